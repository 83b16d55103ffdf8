import csv
import json
from pathlib import Path

import numpy as np
import pytest

from invdet.cli import CSV_HEADER, main
from invdet.config import ConfigError, builtin_configs, read_config, scenario_from_config, scenario_to_config

DATA = Path(__file__).parent / "data"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestPfa:
    def test_invert_r1(self, capsys):
        code, out, _ = run(capsys, "pfa", "--detector", "glrt", "--N", "8", "--K", "12", "--r", "1", "--t", "4",
                           "--pfa", "1e-4")
        assert code == 0
        (res,) = json.loads(out)["results"]
        assert res["eta"] == pytest.approx(1.7826, abs=1e-4)

    def test_zero_threshold(self, capsys):
        code, out, _ = run(capsys, "pfa", "--detector", "glrt", "--N", "8", "--K", "12", "--r", "2", "--t", "4",
                           "--eta", "0")
        assert code == 0
        assert json.loads(out)["results"][0]["pfa"] == 1.0

    def test_several_thresholds(self, capsys):
        code, out, _ = run(capsys, "pfa", "--detector", "lmpid", "--N", "8", "--K", "12", "--r", "2", "--t", "4",
                           "--eta", "-2", "0.5", "99")
        assert code == 0
        assert [r["pfa"] for r in json.loads(out)["results"]][::2] == [1.0, 0.0]

    def test_m_exceeds_n(self, capsys):
        code, _, err = run(capsys, "pfa", "--detector", "glrt", "--N", "8", "--K", "12", "--r", "5", "--t", "4",
                           "--eta", "1")
        assert code == 2 and "exceeds" in err

    def test_mpid_has_no_closed_form(self, capsys):
        code, _, _ = run(capsys, "pfa", "--detector", "mpid", "--N", "8", "--K", "12", "--r", "2", "--t", "4",
                         "--eta", "1")
        assert code == 2

    def test_missing_flag(self, capsys):
        assert run(capsys, "pfa", "--detector", "glrt")[0] == 2


class TestPdCurve:
    def test_golden(self, tmp_path, capsys):
        out = tmp_path / "out.csv"
        assert run(capsys, "pd-curve", str(DATA / "small.json"), "--output", str(out))[0] == 0
        got = list(csv.reader(out.open()))
        want = list(csv.reader((DATA / "small_golden.csv").open()))
        assert got[0] == list(CSV_HEADER) == want[0]
        assert len(got) == len(want)
        for g, w in zip(got[1:], want[1:]):
            assert g[:2] == w[:2]
            for a, b in zip(g[2:], w[2:]):
                assert (a == b == "") or float(a) == pytest.approx(float(b), rel=1e-9, abs=1e-12)

    def test_rerun_identical_bytes(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run(capsys, "pd-curve", str(DATA / "small.json"), "--output", str(a))
        run(capsys, "pd-curve", str(DATA / "small.json"), "--output", str(b))
        assert a.read_bytes() == b.read_bytes()

    def test_json_format(self, capsys):
        code, out, _ = run(capsys, "pd-curve", str(DATA / "small.json"), "--format", "json")
        assert code == 0
        doc = json.loads(out)
        assert [c["detector"] for c in doc] == ["glrt", "2sglrt", "lmpid"]
        assert set(doc[0]) == {"detector", "eta", "achieved_pfa", "rows"}
        assert set(doc[0]["rows"][0]) == set(CSV_HEADER[1:])

    def test_empty_grid(self, tmp_path, capsys):
        cfg = json.loads((DATA / "small.json").read_text())
        cfg["sinr_grid_db"] = []
        p = tmp_path / "bad.json"
        p.write_text(json.dumps(cfg))
        assert run(capsys, "pd-curve", str(p))[0] == 2

    def test_unknown_key(self, tmp_path, capsys):
        cfg = json.loads((DATA / "small.json").read_text())
        cfg["colour"] = "blue"
        p = tmp_path / "bad.json"
        p.write_text(json.dumps(cfg))
        code, _, err = run(capsys, "pd-curve", str(p))
        assert code == 2 and "colour" in err

    def test_decreasing_grid(self, tmp_path, capsys):
        cfg = json.loads((DATA / "small.json").read_text())
        cfg["sinr_grid_db"] = [3.0, 1.0]
        p = tmp_path / "bad.json"
        p.write_text(json.dumps(cfg))
        assert run(capsys, "pd-curve", str(p))[0] == 2

    def test_missing_file(self, capsys):
        assert run(capsys, "pd-curve", "no/such/file.json")[0] == 2

    def test_fig1_desk_builtin(self, tmp_path, capsys):
        out = tmp_path / "fig1.csv"
        assert run(capsys, "pd-curve", "fig1_desk", "--output", str(out))[0] == 0
        rows = list(csv.DictReader(out.open()))
        assert {r["detector"] for r in rows} == {"glrt", "2sglrt", "lmpid", "mpid"}
        assert len(rows) == 4 * 26
        assert all(r["pd_mc"] for r in rows if r["detector"] == "mpid")


class TestSimulate:
    def test_adds_monte_carlo(self, tmp_path, capsys):
        cfg = json.loads((DATA / "small.json").read_text())
        cfg.update(trials_threshold=10_000, trials_pd=2000, detectors=["glrt"])
        p = tmp_path / "sim.json"
        p.write_text(json.dumps(cfg))
        code, out, _ = run(capsys, "simulate", str(p), "--threads", "2")
        assert code == 0
        rows = list(csv.DictReader(out.splitlines()))
        assert all(r["pd_mc"] and r["pd_stderr"] for r in rows)
        for r in rows:
            assert abs(float(r["pd_mc"]) - float(r["pd_closed"])) <= 0.03

    def test_insufficient_trials(self, tmp_path, capsys):
        cfg = json.loads((DATA / "small.json").read_text())
        cfg.update(trials_threshold=500, detectors=["mpid"])
        p = tmp_path / "sim.json"
        p.write_text(json.dumps(cfg))
        assert run(capsys, "simulate", str(p))[0] == 2


class TestVerify:
    def test_invariance(self, capsys):
        code, out, _ = run(capsys, "verify", "--suite", "invariance", "--trials", "1000")
        assert code == 0 and json.loads(out)["passed"]

    def test_maximality(self, capsys):
        code, out, _ = run(capsys, "verify", "--suite", "maximality")
        assert code == 0 and json.loads(out)["failures"] == 0

    def test_identities(self, capsys):
        assert run(capsys, "verify", "--suite", "identities", "--trials", "200")[0] == 0

    def test_invalid_suite(self, capsys):
        assert run(capsys, "verify", "--suite", "everything")[0] == 2


class TestConfig:
    def test_builtins(self):
        names = builtin_configs()
        for k in range(1, 5):
            assert f"fig{k}" in names and f"fig{k}_desk" in names
            paper, desk = read_config(f"fig{k}"), read_config(f"fig{k}_desk")
            assert paper["pfa"] == 1e-4 and desk["pfa"] == 1e-2
            assert paper["detectors"] == ["glrt", "2sglrt", "lmpid", "mpid"]

    def test_scenario_round_trip(self):
        cfg = read_config(str(DATA / "small.json"))
        sc = scenario_from_config(cfg)
        again = scenario_from_config(dict(cfg, **scenario_to_config(sc, cfg["inr_db"])))
        for name in ("H", "J", "M0"):
            np.testing.assert_allclose(getattr(again, name), getattr(sc, name), rtol=1e-12)
        assert (again.K, again.signal_freqs, again.jammer_freqs) == (sc.K, sc.signal_freqs, sc.jammer_freqs)

    def test_schema_type_error(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text('{"N": "eight"}')
        with pytest.raises(ConfigError):
            read_config(str(p))

    def test_invalid_json(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{")
        with pytest.raises(ConfigError):
            read_config(str(p))
