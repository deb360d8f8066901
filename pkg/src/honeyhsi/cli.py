"""Command-line interface: dataset preparation, cross-validation
experiments, component sweeps, training, classification, and serving.

Exit codes: 0 success, 2 argument error, 3 parse error, 4 numerical error.
"""

import argparse
import csv
import json
import sys

from . import evaluation
from .dataset import brand_groups, load_csv, parse_sample_csv, transform_classes, write_csv
from .errors import ArgumentError, HoneyHsiError, exit_code_for
from .pipeline import (
    CLASSIFIERS,
    EXTRACTORS,
    ModelBundle,
    PipelineConfig,
    fit_pipeline,
    predict_sample,
    prepare_dataset,
)


def _gamma_flag(text):
    if text == "auto":
        return "auto"
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"gamma must be 'auto' or a number, got {text!r}")


def _add_pipeline_flags(parser):
    parser.add_argument("--extractor", choices=EXTRACTORS, default="lda")
    parser.add_argument("--components", type=int, default=15)
    parser.add_argument("--classifier", choices=CLASSIFIERS, default="svm-rbf")
    parser.add_argument("--k", type=int, default=5)
    parser.add_argument("--c", type=float, default=1.0)
    parser.add_argument("--gamma", type=_gamma_flag, default="auto")
    parser.add_argument("--alpha", type=float, default=0.05)
    parser.add_argument(
        "--class-transform",
        action="store_true",
        help="relabel origins into brand-group classes before anything else",
    )


def _config_from_args(args, **overrides):
    fields = dict(
        extractor=args.extractor,
        components=args.components,
        classifier=args.classifier,
        k=args.k,
        c=args.c,
        gamma=args.gamma,
        alpha=args.alpha,
        class_transform=args.class_transform,
    )
    fields.update(overrides)
    return PipelineConfig(**fields)


def cmd_prepare(args):
    ds = load_csv(args.input)
    groups = brand_groups(ds, args.alpha)
    relabeled = transform_classes(ds, args.alpha)
    write_csv(relabeled, args.output, include_class=True)
    print(f"classes before: {len(ds.class_names)}")
    print(f"classes after:  {len(relabeled.class_names)}")
    for origin in sorted(groups):
        merged = [g for g in groups[origin] if len(g) > 1]
        for group in merged:
            print(f"merged under {origin}: {'+'.join(group)}")
    print(f"wrote {args.output}")
    return 0


def cmd_evaluate(args):
    ds = load_csv(args.input)
    config = _config_from_args(args)
    instance_report, image_report = evaluation.run_cv(
        ds, config, sample_std=args.sample_std, n_jobs=args.jobs
    )
    if args.report:
        evaluation.write_report_json(
            f"{args.report}.json", instance_report, image_report, config
        )
        evaluation.write_fold_scores_csv(
            f"{args.report}.csv", [instance_report, image_report]
        )
    for report in (instance_report, image_report):
        print(f"{report.scenario} scenario: mean={report.mean!r} std={report.std_dev!r}")
    return 0


def cmd_sweep(args):
    ds = load_csv(args.input)
    if args.m_min < 1 or args.m_max < args.m_min:
        raise ArgumentError("need 1 <= --m-min <= --m-max")
    rows = []
    for m in range(args.m_min, args.m_max + 1):
        config = _config_from_args(args, components=m)
        instance_report, _ = evaluation.run_cv(
            ds, config, sample_std=args.sample_std, n_jobs=args.jobs
        )
        rows.append((m, config.classifier, instance_report.mean, instance_report.std_dev))
        print(f"m={m}: mean={instance_report.mean!r}")
    with open(args.out, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["m", "classifier", "mean_balanced_accuracy", "std_dev"])
        for m, name, mean, std in rows:
            writer.writerow([m, name, repr(mean), repr(std)])
    print(f"wrote {args.out}")
    return 0


def cmd_train(args):
    ds = load_csv(args.input)
    if args.config:
        with open(args.config, encoding="utf-8") as handle:
            config = PipelineConfig.from_dict(json.load(handle))
    else:
        config = _config_from_args(args)
    prepared = prepare_dataset(ds, config)
    bundle = fit_pipeline(prepared, config)
    bundle.save(args.out)
    print(f"trained on {len(prepared)} instances, {len(prepared.class_names)} classes")
    print(f"wrote {args.out}")
    return 0


def cmd_classify(args):
    bundle = ModelBundle.load(args.model)
    with open(args.sample, encoding="utf-8") as handle:
        text = handle.read()
    sample = parse_sample_csv(text, bundle.band_count)
    predictions, image_class = predict_sample(bundle, sample)
    for label in predictions:
        print(label)
    if image_class is not None:
        print(f"image: {image_class}")
    return 0


def cmd_serve(args):
    import uvicorn

    from .service import create_app

    bundle = ModelBundle.load(args.model)
    app = create_app(bundle)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="honeyhsi",
        description="Hyperspectral honey classification pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prepare", help="t-test class transformation of a dataset CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--alpha", type=float, default=0.05)
    p.set_defaults(func=cmd_prepare)

    p = sub.add_parser("evaluate", help="20-fold cross-validation of one pipeline")
    p.add_argument("--input", required=True)
    _add_pipeline_flags(p)
    p.add_argument("--report", help="base path; writes <report>.json and <report>.csv")
    p.add_argument("--sample-std", action="store_true", help="n-1 divisor for the fold std")
    p.add_argument("--jobs", type=int, default=1, help="parallel fold workers")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="accuracy for a range of component counts")
    p.add_argument("--input", required=True)
    _add_pipeline_flags(p)
    p.add_argument("--m-min", type=int, required=True)
    p.add_argument("--m-max", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--sample-std", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("train", help="fit a pipeline on the full dataset and save a bundle")
    p.add_argument("--input", required=True)
    _add_pipeline_flags(p)
    p.add_argument("--config", help="JSON file of pipeline settings (overrides flags)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("classify", help="classify a sample CSV with a saved bundle")
    p.add_argument("--model", required=True)
    p.add_argument("--sample", required=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("serve", help="HTTP classify service for a saved bundle")
    p.add_argument("--model", required=True)
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except HoneyHsiError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exit_code_for(exc)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
