import json

import numpy as np
import pytest

from cod.cli import main
from cod.dataset import load_dataset, load_dataset_with_truth, save_dataset
from conftest import uniform_clusters, with_far_point


@pytest.fixture(scope="module")
def blob_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "blobs.csv"
    save_dataset(uniform_clusters(120, 4, seed=42), path)
    return path


@pytest.fixture(scope="module")
def far_point_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "far.csv"
    save_dataset(with_far_point(uniform_clusters(120, 4, seed=42)), path)
    return path


def read_flags(path):
    lines = path.read_text().splitlines()[1:]
    return [int(line.split(",")[-1]) for line in lines]


class TestIngest:
    def test_reports_shape(self, blob_csv, capsys):
        assert main(["ingest", str(blob_csv)]) == 0
        out = capsys.readouterr().out
        assert "120 samples, 4 features, 2 classes" in out

    def test_writes_canonical_copy(self, blob_csv, tmp_path):
        out = tmp_path / "copy.csv"
        assert main(["ingest", str(blob_csv), "--out", str(out)]) == 0
        reloaded = load_dataset(out)
        assert reloaded.n_samples == 120

    def test_missing_file_is_runtime_error(self, tmp_path, capsys):
        assert main(["ingest", str(tmp_path / "nope.csv")]) == 1
        assert "error:" in capsys.readouterr().err

    def test_bad_label_column(self, blob_csv, capsys):
        assert main(["ingest", str(blob_csv), "--label-col", "species"]) == 1
        assert "not found" in capsys.readouterr().err


class TestInject:
    def test_writes_truth_column(self, blob_csv, tmp_path):
        out = tmp_path / "injected.csv"
        assert main(["inject", str(blob_csv), "--config", "5-5",
                     "--seed", "3", "--out", str(out)]) == 0
        ds, truth = load_dataset_with_truth(out)
        assert truth.count("class") == 6
        assert truth.count("attribute") == 6
        assert ds.n_samples == 120

    def test_unknown_config_is_usage_error(self, blob_csv, tmp_path):
        with pytest.raises(SystemExit) as err:
            main(["inject", str(blob_csv), "--config", "9-9"])
        assert err.value.code == 2


class TestFeatures:
    def test_writes_csv_and_figure(self, blob_csv, tmp_path):
        out = tmp_path / "features.csv"
        assert main(["features", str(blob_csv), "--k", "15", "--out", str(out)]) == 0
        assert len(out.read_text().splitlines()) == 121
        assert (tmp_path / "features.png").exists()

    def test_no_figures_flag(self, blob_csv, tmp_path):
        out = tmp_path / "features.csv"
        assert main(["features", str(blob_csv), "--k", "15", "--out", str(out),
                     "--no-figures"]) == 0
        assert not (tmp_path / "features.png").exists()


class TestTrainModel:
    def test_model_file_and_corpus_auc(self, tmp_path, capsys):
        model_path = tmp_path / "model.json"
        assert main(["train-model", "--seed", "5", "--corpus-datasets", "2",
                     "--model", str(model_path)]) == 0
        doc = json.loads(model_path.read_text())
        assert len(doc["weights"]) == 3
        assert all(np.isfinite(doc["weights"]))
        assert "corpus AUC" in capsys.readouterr().out

    def test_same_seed_byte_identical(self, tmp_path):
        a = tmp_path / "a.json"
        b = tmp_path / "b.json"
        main(["train-model", "--seed", "5", "--corpus-datasets", "2", "--model", str(a)])
        main(["train-model", "--seed", "5", "--corpus-datasets", "2", "--model", str(b)])
        assert a.read_bytes() == b.read_bytes()


class TestDetect:
    def test_clean_fixture_has_no_flags(self, blob_csv, model_path, tmp_path):
        out = tmp_path / "scores.csv"
        assert main(["detect", str(blob_csv), "--model", str(model_path),
                     "--out", str(out), "--no-figures"]) == 0
        assert sum(read_flags(out)) == 0

    def test_far_point_flagged(self, far_point_csv, model_path, tmp_path):
        out = tmp_path / "scores.csv"
        assert main(["detect", str(far_point_csv), "--model", str(model_path),
                     "--out", str(out), "--no-figures"]) == 0
        flags = read_flags(out)
        assert flags[-1] == 1
        assert sum(flags) == 1

    def test_figure_written(self, blob_csv, model_path, tmp_path):
        out = tmp_path / "scores.csv"
        assert main(["detect", str(blob_csv), "--model", str(model_path),
                     "--out", str(out)]) == 0
        assert (tmp_path / "scores.png").exists()

    def test_missing_model_is_runtime_error(self, blob_csv, tmp_path, capsys):
        assert main(["detect", str(blob_csv), "--model",
                     str(tmp_path / "nope.json")]) == 1
        assert "model file not found" in capsys.readouterr().err


class TestEvaluate:
    def test_two_repeats_two_rows(self, blob_csv, model_path, tmp_path, capsys):
        out = tmp_path / "report.csv"
        assert main(["evaluate", str(blob_csv), "--config", "5-5", "--repeats", "2",
                     "--k", "15", "--model", str(model_path), "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "dataset,config,views,repeat,auc"
        assert len(lines) == 3
        assert (tmp_path / "report.txt").exists()
        assert (tmp_path / "report.png").exists()
        assert "auc_mean" in capsys.readouterr().out

    def test_unknown_config_is_usage_error(self, blob_csv):
        with pytest.raises(SystemExit) as err:
            main(["evaluate", str(blob_csv), "--config", "7-7"])
        assert err.value.code == 2

    def test_threads_do_not_change_bytes(self, blob_csv, model_path, tmp_path):
        outs = []
        for threads in ["1", "3"]:
            out = tmp_path / f"report_{threads}.csv"
            assert main(["evaluate", str(blob_csv), "--config", "0-5",
                         "--repeats", "3", "--k", "15", "--seed", "11",
                         "--threads", threads, "--model", str(model_path),
                         "--out", str(out), "--no-figures"]) == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_multiview_evaluate(self, blob_csv, model_path, tmp_path):
        out = tmp_path / "mv.csv"
        assert main(["evaluate", str(blob_csv), "--config", "0-5", "--repeats", "2",
                     "--k", "15", "--views", "2", "--model", str(model_path),
                     "--out", str(out), "--no-figures"]) == 0
        assert ",2," in out.read_text().splitlines()[1]


class TestConfigFile:
    def test_config_file_supplies_defaults(self, blob_csv, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"k": 15, "out": str(tmp_path / "f.csv")}))
        assert main(["features", str(blob_csv), "--config-file", str(cfg),
                     "--no-figures"]) == 0
        assert (tmp_path / "f.csv").exists()

    def test_flags_override_config_file(self, blob_csv, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"k": 2000}))  # would be rejected at runtime
        out = tmp_path / "g.csv"
        assert main(["features", str(blob_csv), "--config-file", str(cfg),
                     "--k", "15", "--out", str(out), "--no-figures"]) == 0
        assert out.exists()

    def test_unknown_key_rejected(self, blob_csv, tmp_path, capsys):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"neighbours": 5}))
        assert main(["features", str(blob_csv), "--config-file", str(cfg)]) == 1
        assert "unknown config file keys" in capsys.readouterr().err

    def test_missing_config_file(self, blob_csv, tmp_path):
        assert main(["features", str(blob_csv), "--config-file",
                     str(tmp_path / "nope.json")]) == 1
