import json

import numpy as np
import pytest

from honeyhsi.cli import main
from honeyhsi.dataset import load_csv, write_csv
from synthetic import blob_dataset, multi_brand_origin_dataset


@pytest.fixture()
def blob_csv(tmp_path):
    ds = blob_dataset(n_classes=2, instances_per_image=2, bands=4, seed=19)
    path = tmp_path / "blobs.csv"
    write_csv(ds, path, include_class=False)
    return path, ds


def run_cli(capsys, *argv):
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestPrepare:
    def test_reports_counts_and_groups(self, tmp_path, capsys):
        ds = multi_brand_origin_dataset([0.0, 8.0, 8.0])
        src = tmp_path / "raw.csv"
        out = tmp_path / "prepared.csv"
        write_csv(ds, src, include_class=False)
        code, stdout, _ = run_cli(capsys, "prepare", "--input", src, "--output", out, "--alpha", 0.05)
        assert code == 0
        assert "classes before: 1" in stdout
        assert "classes after:  2" in stdout
        assert "merged under Rewarewa: C2+C3" in stdout
        prepared = load_csv(out)
        assert prepared.class_names == ("C1_Rewarewa", "C2_Rewarewa")

    def test_single_brand_unchanged(self, blob_csv, tmp_path, capsys):
        src, ds = blob_csv
        out = tmp_path / "prepared.csv"
        code, stdout, _ = run_cli(capsys, "prepare", "--input", src, "--output", out)
        assert code == 0
        assert load_csv(out).class_names == ds.class_names

    def test_parse_error_exit_code(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("origin,brand,acquisition,image_id,b001\nA,B,9,img,0.5\n")
        out = tmp_path / "out.csv"
        code, _, stderr = run_cli(capsys, "prepare", "--input", bad, "--output", out)
        assert code == 3
        assert "acquisition" in stderr


class TestEvaluate:
    def test_writes_reports_and_prints_exact_mean(self, blob_csv, tmp_path, capsys):
        src, _ = blob_csv
        report = tmp_path / "report"
        code, stdout, _ = run_cli(
            capsys,
            "evaluate",
            "--input", src,
            "--extractor", "none",
            "--classifier", "knn",
            "--k", 1,
            "--report", report,
        )
        assert code == 0
        doc = json.loads((tmp_path / "report.json").read_text())
        for line in stdout.splitlines():
            if line.startswith("instance scenario:"):
                printed_mean = float(line.split("mean=")[1].split()[0])
                assert printed_mean == doc["scenarios"]["instance"]["mean"]
        assert (tmp_path / "report.csv").exists()

    def test_bad_flag_exits_2(self, blob_csv, capsys):
        src, _ = blob_csv
        with pytest.raises(SystemExit) as exc:
            main(["evaluate", "--input", str(src), "--classifier", "forest"])
        assert exc.value.code == 2

    def test_missing_file_exits_2(self, capsys):
        code, _, _ = run_cli(capsys, "evaluate", "--input", "/nonexistent.csv")
        assert code == 2


class TestSweep:
    def test_sweep_writes_table(self, tmp_path, capsys):
        ds = blob_dataset(n_classes=4, instances_per_image=1, bands=6, seed=23)
        src = tmp_path / "ds.csv"
        write_csv(ds, src, include_class=False)
        out = tmp_path / "sweep.csv"
        code, _, _ = run_cli(
            capsys,
            "sweep",
            "--input", src,
            "--extractor", "lda",
            "--classifier", "knn",
            "--k", 1,
            "--m-min", 1,
            "--m-max", 3,
            "--out", out,
        )
        assert code == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "m,classifier,mean_balanced_accuracy,std_dev"
        assert len(lines) == 4
        ms = [int(line.split(",")[0]) for line in lines[1:]]
        assert ms == [1, 2, 3]

    def test_single_m(self, tmp_path, capsys):
        ds = blob_dataset(n_classes=3, instances_per_image=1, bands=5, seed=29)
        src = tmp_path / "ds.csv"
        write_csv(ds, src, include_class=False)
        out = tmp_path / "sweep.csv"
        code, _, _ = run_cli(
            capsys,
            "sweep",
            "--input", src,
            "--extractor", "lda",
            "--classifier", "knn",
            "--m-min", 2,
            "--m-max", 2,
            "--out", out,
        )
        assert code == 0
        assert len(out.read_text().strip().splitlines()) == 2


class TestTrainClassify:
    def test_train_classify_round_trip(self, blob_csv, tmp_path, capsys):
        src, ds = blob_csv
        bundle_path = tmp_path / "bundle.json"
        code, _, _ = run_cli(
            capsys,
            "train",
            "--input", src,
            "--extractor", "none",
            "--classifier", "knn",
            "--k", 1,
            "--out", bundle_path,
        )
        assert code == 0

        sample_path = tmp_path / "sample.csv"
        header = "image_id," + ",".join(f"b{i:03d}" for i in range(1, 5))
        rows = ["img," + ",".join(repr(float(v)) for v in ds.bands[i]) for i in range(3)]
        sample_path.write_text("\n".join([header] + rows) + "\n")
        code, stdout, _ = run_cli(capsys, "classify", "--model", bundle_path, "--sample", sample_path)
        assert code == 0
        lines = stdout.strip().splitlines()
        assert lines[:3] == list(ds.class_labels[:3])
        assert lines[3] == f"image: {ds.class_labels[0]}"

    def test_train_with_config_file(self, blob_csv, tmp_path, capsys):
        src, _ = blob_csv
        config_path = tmp_path / "config.json"
        config_path.write_text(
            json.dumps({"extractor": "pca", "components": 2, "classifier": "knn", "k": 1})
        )
        bundle_path = tmp_path / "bundle.json"
        code, _, _ = run_cli(
            capsys, "train", "--input", src, "--config", config_path, "--out", bundle_path
        )
        assert code == 0
        doc = json.loads(bundle_path.read_text())
        assert doc["config"]["extractor"] == "pca"

    def test_train_bundle_reserialization_identical(self, blob_csv, tmp_path, capsys):
        src, _ = blob_csv
        out1 = tmp_path / "b1.json"
        out2 = tmp_path / "b2.json"
        for out in (out1, out2):
            code, _, _ = run_cli(
                capsys,
                "train",
                "--input", src,
                "--extractor", "lda",
                "--components", 1,
                "--classifier", "svm-linear",
                "--out", out,
            )
            assert code == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_classify_cli_matches_in_process(self, blob_csv, tmp_path, capsys):
        from honeyhsi.pipeline import ModelBundle, PipelineConfig, fit_pipeline

        src, ds = blob_csv
        bundle_path = tmp_path / "bundle.json"
        run_cli(
            capsys,
            "train",
            "--input", src,
            "--extractor", "lda",
            "--components", 1,
            "--classifier", "svm-rbf",
            "--out", bundle_path,
        )
        sample_path = tmp_path / "sample.csv"
        header = ",".join(f"b{i:03d}" for i in range(1, 5))
        rng = np.random.default_rng(31)
        queries = rng.normal(size=(6, 4)) + ds.bands.mean(axis=0)
        rows = [",".join(repr(float(v)) for v in q) for q in queries]
        sample_path.write_text("\n".join([header] + rows) + "\n")
        code, stdout, _ = run_cli(capsys, "classify", "--model", bundle_path, "--sample", sample_path)
        assert code == 0
        printed = stdout.strip().splitlines()
        bundle = ModelBundle.load(bundle_path)
        expected = [str(p) for p in bundle.predict(queries)]
        assert printed[: len(expected)] == expected

    def test_classify_empty_sample_exits_2(self, blob_csv, tmp_path, capsys):
        src, _ = blob_csv
        bundle_path = tmp_path / "bundle.json"
        run_cli(capsys, "train", "--input", src, "--extractor", "none",
                "--classifier", "knn", "--out", bundle_path)
        empty = tmp_path / "empty.csv"
        empty.write_text("")
        code, _, _ = run_cli(capsys, "classify", "--model", bundle_path, "--sample", empty)
        assert code == 2

    def test_classify_band_mismatch_exits_3(self, blob_csv, tmp_path, capsys):
        src, _ = blob_csv
        bundle_path = tmp_path / "bundle.json"
        run_cli(capsys, "train", "--input", src, "--extractor", "none",
                "--classifier", "knn", "--out", bundle_path)
        bad = tmp_path / "bad.csv"
        bad.write_text("b001,b002\n0.1,0.2\n")
        code, _, _ = run_cli(capsys, "classify", "--model", bundle_path, "--sample", bad)
        assert code == 3
