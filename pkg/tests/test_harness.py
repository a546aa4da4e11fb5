import json
import math
import time

import numpy as np
import pytest
import yaml

from zlab.harness import cli
from zlab.harness.config import from_mapping, load_config
from zlab.harness.output import fmt, read_csv, verify_manifest
from zlab.harness.runs import envelope_constant, parallel_map, run_experiment
from zlab.spectral import ConfigError
from zlab.yosida import INF

SMALL = {"grid": {"L": "pi", "N": 32}, "stepper": {"dt": 0.005, "T": 0.2, "observe_every": 4}}


def _write(tmp_path, d, name="cfg.yaml"):
    p = tmp_path / name
    p.write_text(yaml.safe_dump(d))
    return p


class TestConfig:
    def test_defaults(self):
        cfg = from_mapping({"experiment": "simulate"})
        assert cfg.grid.N == 128 and cfg.grid.L == pytest.approx(math.pi)
        assert cfg.stepper.dt == 1e-3 and cfg.n_list == (64,)

    def test_levels_and_lengths(self):
        cfg = from_mapping({"experiment": "simulate", "n_list": [4, "inf"], "grid": {"L": "2pi", "N": 16}})
        assert cfg.n_list == (4, INF) and cfg.grid.L == pytest.approx(2 * math.pi)

    @pytest.mark.parametrize(
        "bad",
        [
            {"experiment": "nope"},
            {"experiment": "simulate", "n_list": []},
            {"experiment": "simulate", "n_list": [0]},
            {"experiment": "simulate", "grid": {"N": 2}},
            {"experiment": "simulate", "stepper": {"dt": -1}},
            {"experiment": "simulate", "colour": "red"},
            {"experiment": "cauchy", "n_list": [8, 8]},
            {"experiment": "cauchy", "n_list": [12]},
            {"experiment": "cauchy", "n_list": [16, 8]},
            {"experiment": "simulate", "bounds": {"C_M1": 0, "C_M2": 1}},
        ],
    )
    def test_rejects(self, bad):
        with pytest.raises(ConfigError):
            from_mapping(bad)

    def test_bad_yaml(self, tmp_path):
        p = tmp_path / "x.yaml"
        p.write_text("grid: [unclosed")
        with pytest.raises(ConfigError):
            load_config(p)

    def test_cli_overrides(self, tmp_path):
        cfg = load_config(_write(tmp_path, {"experiment": "simulate", "seed": 1}), "invariants", 9)
        assert cfg.experiment == "invariants" and cfg.seed == 9


class TestOutput:
    def test_fmt_round_trips(self):
        for x in (0.1, 1 / 3, 1e-300, -2.5e17, 0.0):
            assert float(fmt(x)) == x
        assert fmt(math.inf) == "inf"

    def test_parallel_map_keyed(self):
        out = parallel_map(lambda k: k * k, [3, 1, 2], threads=3)
        assert out == {3: 9, 1: 1, 2: 4}

    def test_envelope_constant(self):
        t = np.linspace(0, 1, 11)
        F = 2 * t
        # largest ratio on the first interval, where F + 1 is smallest
        assert envelope_constant(t, F) == pytest.approx(2.0 / 1.2**0.75)


class TestExperiments:
    def test_zero_datum(self, tmp_path):
        cfg = from_mapping({"experiment": "simulate", "datum": {"family": "modes", "u": [], "v": [], "w": []},
                            "n_list": [4], **SMALL})
        res = run_experiment(cfg, tmp_path)
        head, rows = read_csv(tmp_path / "ledger_n4.csv")
        assert head[0] == "t" and np.all(rows[:, 1:] == 0.0) and np.any(rows[:, 0] > 0)
        assert res.exit_code == 0
        assert verify_manifest(tmp_path) == []

    def test_simulate_conservation(self, tmp_path):
        cfg = from_mapping({"experiment": "simulate", "n_list": [64, "inf"],
                            "datum": {"family": "modes", "u": [[1, 1.0, 0.0], [3, 0.2, 0.1]]}, **SMALL})
        res = run_experiment(cfg, tmp_path)
        assert res.exit_code == 0, res.failures()
        assert res.summary["levels"]["inf"]["M_drift"] <= 1e-8

    def test_manifest_detects_tampering(self, tmp_path):
        cfg = from_mapping({"experiment": "simulate", "n_list": [4], **SMALL})
        run_experiment(cfg, tmp_path)
        (tmp_path / "ledger_n4.csv").write_text("t\n0.0\n")
        assert verify_manifest(tmp_path) == ["ledger_n4.csv"]
        man = json.loads((tmp_path / "manifest.json").read_text())
        assert set(man) >= {"config", "code_version", "files", "wall_clock_s", "checks"}

    def test_cauchy(self, tmp_path):
        cfg = from_mapping({"experiment": "cauchy", "n_list": [8, 16, 32], **SMALL})
        res = run_experiment(cfg, tmp_path)
        sups = [res.summary["pairs"][k]["sup_difference"] for k in ("8", "16", "32")]
        assert sups[0] > sups[1] > sups[2]
        assert (tmp_path / "pair_m16_n8.csv").exists()

    def test_depend_zero(self, tmp_path):
        cfg = from_mapping({"experiment": "depend", "n_list": [16], "epsilons": [0.02, 0.01], **SMALL})
        res = run_experiment(cfg, tmp_path)
        assert res.summary["deviation"]["0.0"] == 0.0
        assert 0.4 <= res.summary["halving_ratios"]["0.02"] <= 0.6

    def test_growth_zero_datum(self, tmp_path):
        cfg = from_mapping({"experiment": "growth", "n_list": [8], "datum": {"family": "modes"}, **SMALL})
        res = run_experiment(cfg, tmp_path)
        assert res.summary["levels"]["8"]["p"] == 0.0
        assert (tmp_path / "growth_n8.svg").read_text().startswith("<svg")

    def test_growth_reproducible(self, tmp_path):
        cfg = from_mapping({"experiment": "growth", "n_list": [8], **SMALL})
        a = run_experiment(cfg, tmp_path / "a").summary
        b = run_experiment(cfg, tmp_path / "b").summary
        assert a == b

    def test_thread_count_does_not_change_bytes(self, tmp_path):
        cfg = from_mapping({"experiment": "simulate", "n_list": [2, 8, "inf"], **SMALL})
        run_experiment(cfg, tmp_path / "one", threads=1)
        run_experiment(cfg, tmp_path / "three", threads=3)
        for name in ("ledger_n2.csv", "ledger_n8.csv", "ledger_ninf.csv", "summary.json"):
            assert (tmp_path / "one" / name).read_bytes() == (tmp_path / "three" / name).read_bytes()
        m1 = json.loads((tmp_path / "one" / "manifest.json").read_text())
        m3 = json.loads((tmp_path / "three" / "manifest.json").read_text())
        assert m1["files"] == m3["files"]

    def test_invariants_seed(self):
        a = run_experiment(from_mapping({"experiment": "invariants", "seed": 1}), None)
        b = run_experiment(from_mapping({"experiment": "invariants", "seed": 2}), None)
        assert [c["passed"] for c in a.manifest.checks] == [c["passed"] for c in b.manifest.checks]
        assert all(c["passed"] for c in a.manifest.checks)
        assert a.summary != b.summary


class TestCli:
    def test_selfcheck_fast(self, tmp_path, capsys):
        t0 = time.perf_counter()
        assert cli.main(["selfcheck", "--out", str(tmp_path)]) == 0
        assert time.perf_counter() - t0 < 10
        assert "PASS" in capsys.readouterr().out

    def test_config_error_exit(self, tmp_path, capsys):
        assert cli.main(["simulate", "--config", str(tmp_path / "missing.yaml")]) == 2
        assert cli.main(["simulate"]) == 2

    def test_no_output_dir(self, tmp_path, monkeypatch):
        monkeypatch.delenv("ZLAB_OUT", raising=False)
        p = _write(tmp_path, {"experiment": "simulate", "n_list": [4], **SMALL})
        assert cli.main(["simulate", "--config", str(p)]) == 2

    def test_env_fallback(self, tmp_path, monkeypatch):
        monkeypatch.setenv("ZLAB_OUT", str(tmp_path / "env"))
        p = _write(tmp_path, {"experiment": "simulate", "n_list": [4], **SMALL})
        assert cli.main(["simulate", "--config", str(p)]) == 0
        assert (tmp_path / "env" / "manifest.json").exists()

    def test_fault_exit(self, tmp_path, capsys):
        p = _write(tmp_path, {"experiment": "invariants"})
        assert cli.main(["invariants", "--config", str(p), "--inject-fault", "contraction"]) == 1
        assert "yosida.contraction" in capsys.readouterr().err

    def test_blowup_exit(self, tmp_path, capsys):
        p = _write(tmp_path, {"experiment": "simulate", "n_list": ["inf"], "grid": {"N": 16},
                              "datum": {"family": "modes", "u": [[16, 1e5, 0]], "v": [[16, 1e5, 0]]},
                              "stepper": {"method": "rk4", "dt": 0.5, "T": 10}})
        assert cli.main(["simulate", "--config", str(p), "--out", str(tmp_path / "o")]) == 3
        assert "blow-up" in capsys.readouterr().err
