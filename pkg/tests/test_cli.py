import json
import subprocess
import sys

import pytest

from gbarmin import GbarParams, entropy_report, storage
from gbarmin.cli import main


def _write_params(tmp_path, params):
    path = tmp_path / "params.json"
    path.write_text(params.to_json())
    return path


PARAMS = GbarParams(alpha=(0.25, -0.25), beta=0.5)


class TestGenerate:
    def test_writes_loadable_deterministic_file(self, tmp_path):
        params_path = _write_params(tmp_path, PARAMS)
        out1 = tmp_path / "a.bin"
        out2 = tmp_path / "b.bin"
        for out in (out1, out2):
            rc = main(["generate", "--params", str(params_path),
                       "--bits", "20000", "--seed", "9", "--burn-in", "1000",
                       "--out", str(out)])
            assert rc == 0
        assert out1.read_bytes() == out2.read_bytes()
        bits, sidecar = storage.read_bit_file(out1)
        assert len(bits) == 20000
        assert sidecar["seed"] == 9

    def test_inline_alpha(self, tmp_path):
        out = tmp_path / "c.bin"
        rc = main(["generate", "--alpha", "0.25,-0.25", "--bits", "5000",
                   "--out", str(out)])
        assert rc == 0
        assert storage.read_bit_file(out)[0][0] in (0, 1)

    def test_shape_arguments(self, tmp_path):
        out = tmp_path / "d.bin"
        rc = main(["generate", "--shape", "point_to_point", "--p", "3",
                   "--mass", "0.4", "--bits", "4000", "--out", str(out)])
        assert rc == 0


class TestExact:
    def test_rows_match_library(self, tmp_path):
        params_path = _write_params(tmp_path, PARAMS)
        out = tmp_path / "exact.csv"
        rc = main(["exact", "--params", str(params_path), "--n", "0,2-4",
                   "--out", str(out)])
        assert rc == 0
        rows = storage.read_rows(out)
        assert [r["n"] for r in rows] == ["0", "2", "3", "4"]
        for row in rows:
            report = entropy_report(PARAMS, int(row["n"]))
            assert float(row["h_avg"]) == pytest.approx(report.h_avg,
                                                        rel=1e-12)
            assert float(row["h_min"]) == pytest.approx(report.h_min,
                                                        rel=1e-12)

    def test_requires_model(self):
        with pytest.raises(SystemExit):
            main(["exact", "--n", "1"])


class TestMcPredict:
    def test_mc_row(self, tmp_path):
        out = tmp_path / "mc.csv"
        rc = main(["mc", "--alpha", "0.3", "--n", "2", "--samples", "2",
                   "--sample-bits", "50000", "--seed", "3",
                   "--out", str(out)])
        assert rc == 0
        row = storage.read_rows(out)[0]
        assert row["method"] == "mc"
        assert row["num_samples"] == "2"
        assert 0.0 < float(row["h_min"]) <= 1.0

    def test_counting_predictor_row(self, tmp_path):
        out = tmp_path / "pred.csv"
        rc = main(["predict", "--alpha", "0.4,-0.2", "--target-bits", "2",
                   "--strategy", "joint", "greedy",
                   "--train-bits", "100000", "--test-bits", "50000",
                   "--seed", "5", "--test-seed", "6", "--out", str(out)])
        assert rc == 0
        rows = storage.read_rows(out)
        assert [r["strategy"] for r in rows] == ["joint", "greedy"]
        assert all(r["method"] == "predict" for r in rows)

    def test_overlapping_seeds_warn(self, tmp_path, capsys):
        out = tmp_path / "overlap.csv"
        main(["predict", "--alpha", "0.5", "--target-bits", "1",
              "--train-bits", "20000", "--test-bits", "20000",
              "--seed", "5", "--test-seed", "5", "--out", str(out)])
        assert "overlap" in capsys.readouterr().err

    def test_nist_predictor_row(self, tmp_path):
        out = tmp_path / "nist.csv"
        rc = main(["predict", "--alpha", "0.5", "--predictor", "multimmc",
                   "--stream-bits", "150000", "--seed", "8",
                   "--out", str(out)])
        assert rc == 0
        row = storage.read_rows(out)[0]
        assert row["predictor"] == "multimmc"
        assert row["h_final"] != ""


class TestSweep:
    def test_spec_file_and_seed_override(self, tmp_path):
        spec = {
            "name": "mini", "seed": 1, "methods": ["exact"],
            "shapes": ["uniform"], "p_values": [1], "alpha_masses": [0.5],
            "n_values": [0, 1],
        }
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(json.dumps(spec))
        rc = main(["sweep", "--spec", str(spec_path),
                   "--out", str(tmp_path / "run"), "--seed", "42"])
        assert rc == 0
        rows = storage.read_rows(tmp_path / "run" / "mini.csv")
        assert len(rows) == 2
        meta = json.loads((tmp_path / "run" / "run_meta.json").read_text())
        assert meta["spec"]["seed"] == 42

    def test_family_preset(self, tmp_path):
        rc = main(["sweep", "--family", "fig1",
                   "--out", str(tmp_path / "fig1")])
        assert rc == 0
        rows = storage.read_rows(tmp_path / "fig1" / "fig1.csv")
        # 2 shapes x 3 p x 5 masses x 3 n
        assert len(rows) == 90
        assert all(r["error"] == "" for r in rows)
        # the lag-p point-to-point family keeps h_avg at its limit for all n
        p2p = [r for r in rows if r["alpha_shape"] == "point_to_point"]
        for row in p2p:
            assert float(row["h_avg"]) == pytest.approx(float(row["h_limit"]),
                                                        abs=1e-9)

    def test_requires_exactly_one_source(self, tmp_path):
        with pytest.raises(SystemExit):
            main(["sweep", "--out", str(tmp_path)])
        with pytest.raises(SystemExit):
            main(["sweep", "--family", "fig1", "--spec", "x.json",
                  "--out", str(tmp_path)])


def test_oversized_request_exits_cleanly(tmp_path):
    with pytest.raises(SystemExit, match="cap"):
        main(["exact", "--alpha", "0.5", "--n", "29"])


def test_backend_env_validation(monkeypatch):
    from gbarmin import _backend

    monkeypatch.setenv(_backend.ENV_VAR, "fortran")
    with pytest.raises(ValueError):
        _backend.backend_name()
    with pytest.raises(KeyError):
        _backend.kernel("solve_everything")


def test_module_entry_point_help():
    proc = subprocess.run(
        [sys.executable, "-m", "gbarmin.cli", "--help"],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert "sweep" in proc.stdout
