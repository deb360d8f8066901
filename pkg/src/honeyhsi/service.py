"""HTTP classify service exposing one trained bundle.

Endpoints: POST /classify (text/csv body in, JSON out), GET /model,
GET /healthz. The bundle is immutable shared state; requests never
mutate it, so concurrent handling is safe.
"""

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse

from .errors import ArgumentError, BandCountError, ParseError
from .dataset import parse_sample_csv
from .pipeline import predict_sample

MAX_BODY_BYTES = 16 * 1024 * 1024


def create_app(bundle):
    app = FastAPI(title="honeyhsi classify service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["GET", "POST"],
        allow_headers=["*"],
    )

    @app.get("/healthz")
    def healthz():
        return PlainTextResponse("ok")

    @app.get("/model")
    def model_info():
        return JSONResponse(bundle.info())

    @app.post("/classify")
    async def classify(request: Request):
        body = await request.body()
        if len(body) > MAX_BODY_BYTES:
            return JSONResponse({"error": "body exceeds 16 MiB"}, status_code=413)
        try:
            text = body.decode("utf-8")
        except UnicodeDecodeError:
            return JSONResponse({"error": "body is not UTF-8 text"}, status_code=400)
        try:
            sample = parse_sample_csv(text, bundle.band_count)
        except BandCountError as exc:
            return JSONResponse({"error": str(exc)}, status_code=422)
        except ParseError as exc:
            return JSONResponse(
                {"error": str(exc), "row": exc.row, "column": exc.column},
                status_code=400,
            )
        except ArgumentError as exc:
            return JSONResponse({"error": str(exc)}, status_code=400)
        predictions, image_class = predict_sample(bundle, sample)
        doc = {
            "perInstance": predictions,
            "spectrumEcho": [list(map(float, row)) for row in sample.bands],
            "modelInfo": bundle.info(),
        }
        if image_class is not None:
            doc["imageClass"] = image_class
        return JSONResponse(doc)

    return app
