import json
import os
import subprocess
import sys

import jsonschema
import numpy as np
import pytest

from cvloss.cli import main


def run_cli(args):
    return main([str(a) for a in args])


def write_config(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return path


def load_run(outdir):
    with open(os.path.join(outdir, "run.json")) as fh:
        return json.load(fh)


@pytest.fixture
def schema():
    import importlib.resources

    return json.loads(
        importlib.resources.files("cvloss").joinpath("config_schema.json").read_text()
    )


class TestSweep:
    def test_threshold_and_columns(self, tmp_path, schema):
        cfg = write_config(tmp_path, "c.json", {"squeezing_db": [2.0, 5.0], "thermal_n": 1.0})
        out = tmp_path / "out"
        assert run_cli(["single-mode-sweep", "--config", cfg, "--out", out]) == 0
        lines = (out / "sweep.csv").read_text().splitlines()
        assert lines[0] == "s_db,n,exp_minus_2xi,w_origin,negative_flag"
        assert len(lines) == 1 + 2 * 101
        record = load_run(out)
        jsonschema.validate(record, {**schema, "$ref": "#/$defs/run_record"})
        for th in record["results"]["thresholds"]:
            assert th["tau_star"] == pytest.approx(0.5, abs=1e-9)
        # the negative region is exactly the tau > 1/2 side
        for line in lines[1:]:
            s_db, n, tau, w0, flag = line.split(",")
            assert (flag == "true") == (float(tau) > 0.5)
            assert (float(w0) < 0) == (flag == "true") or abs(float(w0)) < 1e-12

    def test_zero_crossing_shifts_with_noise(self, tmp_path):
        cfg = write_config(
            tmp_path, "c.json", {"squeezing_db": [4.0, 6.0, 8.0, 10.0], "thermal_n": 1.2}
        )
        out = tmp_path / "out"
        assert run_cli(["single-mode-sweep", "--config", cfg, "--out", out, "--no-plot"]) == 0
        ths = load_run(out)["results"]["thresholds"]
        taus = [t["tau_star"] for t in ths]
        assert all(a > b for a, b in zip(taus, taus[1:]))  # more squeezing: more robust
        assert all(t > 0.5 for t in taus)

    def test_lossless_origin_anchor(self, tmp_path):
        cfg = write_config(tmp_path, "c.json", {"squeezing_db": [5.0], "thermal_n": 1.0})
        out = tmp_path / "out"
        assert run_cli(["single-mode-sweep", "--config", cfg, "--out", out, "--no-plot"]) == 0
        lossless = [
            line for line in (out / "sweep.csv").read_text().splitlines()[1:]
            if line.split(",")[2] == "1"
        ]
        assert len(lossless) == 1
        assert float(lossless[0].split(",")[3]) == pytest.approx(-1 / (2 * np.pi), abs=1e-12)

    def test_vacuum_subtraction_is_numerical_failure(self, tmp_path, capsys):
        # 0 dB pure state holds vacuum in the subtraction mode
        cfg = write_config(tmp_path, "c.json", {"squeezing_db": [0.0], "thermal_n": 1.0})
        assert run_cli(["single-mode-sweep", "--config", cfg, "--out", tmp_path / "o"]) == 4
        assert "numerical failure" in capsys.readouterr().err

    def test_missing_field_is_config_error(self, tmp_path):
        cfg = write_config(tmp_path, "c.json", {"thermal_n": 1.0})
        assert run_cli(["single-mode-sweep", "--config", cfg, "--out", tmp_path / "o"]) == 2

    def test_invalid_json_is_config_error(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        assert run_cli(["single-mode-sweep", "--config", path, "--out", tmp_path / "o"]) == 2

    def test_schema_violation_is_config_error(self, tmp_path):
        cfg = write_config(tmp_path, "c.json", {"squeezing_db": [2.0], "thermal_n": 0.2})
        assert run_cli(["single-mode-sweep", "--config", cfg, "--out", tmp_path / "o"]) == 2


class TestGraphDemo:
    def test_outputs_and_determinism(self, tmp_path, schema):
        cfg = write_config(
            tmp_path, "c.json", {"scenario": "vertex-loss", "grid": {"radius": 2.0, "step": 0.5}}
        )
        out1, out2 = tmp_path / "o1", tmp_path / "o2"
        assert run_cli(["graph-demo", "--config", cfg, "--out", out1, "--no-plot"]) == 0
        assert run_cli(["graph-demo", "--config", cfg, "--out", out2, "--no-plot"]) == 0
        names = sorted(p.name for p in out1.iterdir())
        assert "run.json" in names and "schema.json" in names
        for name in names:
            if name.endswith((".csv", ".json")):
                assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
        record = load_run(out1)
        jsonschema.validate(record, {**schema, "$ref": "#/$defs/run_record"})
        assert record["results"]["orders"] == ["subtract-first"]
        assert [c["xi"] for c in record["results"]["cells"]] == [0.0, 1.0, 2.0]

    def test_spectator_grids_byte_identical_across_loss(self, tmp_path):
        cfg = write_config(
            tmp_path, "c.json", {"scenario": "vertex-loss", "grid": {"radius": 3.0, "step": 0.25}}
        )
        out = tmp_path / "o"
        assert run_cli(["graph-demo", "--config", cfg, "--out", out, "--no-plot"]) == 0
        for v in (2, 3, 4):
            base = (out / f"wigner_subtract-first_xi0_v{v}.csv").read_bytes()
            for xi in (1, 2):
                assert (out / f"wigner_subtract-first_xi{xi}_v{v}.csv").read_bytes() == base

    def test_uniform_vertex_one_equals_vertex_loss(self, tmp_path):
        grid = {"radius": 3.0, "step": 0.25}
        cfg_v = write_config(tmp_path, "v.json", {"scenario": "vertex-loss", "grid": grid})
        cfg_u = write_config(tmp_path, "u.json", {"scenario": "uniform", "grid": grid})
        out_v, out_u = tmp_path / "ov", tmp_path / "ou"
        assert run_cli(["graph-demo", "--config", cfg_v, "--out", out_v, "--no-plot"]) == 0
        assert run_cli(["graph-demo", "--config", cfg_u, "--out", out_u, "--no-plot"]) == 0
        for xi in (0, 1, 2):
            a = (out_v / f"wigner_subtract-first_xi{xi}_v1.csv").read_bytes()
            b = (out_u / f"wigner_subtract-first_xi{xi}_v1.csv").read_bytes()
            assert a == b

    def test_off_support_vertex_one_invariant(self, tmp_path):
        cfg = write_config(
            tmp_path, "c.json", {"scenario": "off-support", "grid": {"radius": 3.0, "step": 0.25}}
        )
        out = tmp_path / "o"
        assert run_cli(["graph-demo", "--config", cfg, "--out", out, "--no-plot"]) == 0
        base = (out / "wigner_subtract-first_xi0_v1.csv").read_bytes()
        for xi in (1, 2):
            assert (out / f"wigner_subtract-first_xi{xi}_v1.csv").read_bytes() == base

    def test_overlapping_emits_both_orders(self, tmp_path):
        cfg = write_config(
            tmp_path, "c.json", {"scenario": "overlapping", "grid": {"radius": 2.0, "step": 0.5}}
        )
        out = tmp_path / "o"
        assert run_cli(["graph-demo", "--config", cfg, "--out", out, "--no-plot"]) == 0
        record = load_run(out)
        assert record["results"]["orders"] == ["subtract-first", "lose-first"]
        assert (out / "wigner_lose-first_xi1_v1.csv").exists()

    def test_thread_count_does_not_change_bytes(self, tmp_path, monkeypatch):
        cfg = write_config(
            tmp_path, "c.json", {"scenario": "uniform", "grid": {"radius": 2.0, "step": 0.5}}
        )
        out1, out2 = tmp_path / "o1", tmp_path / "o2"
        assert run_cli(["graph-demo", "--config", cfg, "--out", out1, "--no-plot"]) == 0
        monkeypatch.setenv("CVLOSS_THREADS", "4")
        assert run_cli(["graph-demo", "--config", cfg, "--out", out2, "--no-plot"]) == 0
        for p in sorted(out1.iterdir()):
            if p.name.endswith((".csv", ".json")):
                assert p.read_bytes() == (out2 / p.name).read_bytes()

    def test_inline_scenario(self, tmp_path):
        cfg = write_config(
            tmp_path,
            "c.json",
            {
                "scenario": {
                    "adjacency": [[0, 1], [1, 0]],
                    "squeezing_db": [6.0, 6.0],
                    "subtract_vertex": 1,
                    "loss_modes": [{"vertex": 2, "gamma": 1.0}],
                },
                "grid": {"radius": 2.0, "step": 0.5},
                "xi": [0.0, 0.5],
            },
        )
        out = tmp_path / "o"
        assert run_cli(["graph-demo", "--config", cfg, "--out", out, "--no-plot"]) == 0
        record = load_run(out)
        assert len(record["results"]["cells"]) == 2

    def test_unknown_scenario_is_config_error(self, tmp_path):
        cfg = write_config(tmp_path, "c.json", {"scenario": "diagonal"})
        assert run_cli(["graph-demo", "--config", cfg, "--out", tmp_path / "o"]) == 2

    def test_renders_figures_by_default(self, tmp_path):
        cfg = write_config(
            tmp_path, "c.json", {"scenario": "vertex-loss", "grid": {"radius": 2.0, "step": 0.5}, "xi": [0.0]}
        )
        out = tmp_path / "o"
        assert run_cli(["graph-demo", "--config", cfg, "--out", out]) == 0
        assert (out / "wigner_subtract-first_xi0.png").exists()
        assert (out / "kurtosis_subtract-first.png").exists()


class TestNegativityThreshold:
    def test_pure_single_mode_threshold(self, tmp_path):
        cfg = write_config(
            tmp_path,
            "c.json",
            {"state": {"type": "single-mode", "s_db": 10.0, "n": 1.0, "gamma": 2.0}, "xi_max": 5.0},
        )
        out = tmp_path / "o"
        assert run_cli(["negativity-threshold", "--config", cfg, "--out", out, "--no-plot"]) == 0
        results = load_run(out)["results"]
        assert results["status"] == "crossing"
        assert results["xi_star"] == pytest.approx(np.log(2.0) / 2.0, abs=1e-8)
        assert results["exp_minus_2xi_star"] == pytest.approx(0.5, abs=1e-8)

    def test_insufficient_squeezing_never_negative(self, tmp_path):
        cfg = write_config(
            tmp_path,
            "c.json",
            {"state": {"type": "single-mode", "s_db": 10 * np.log10(1.05), "n": 2.0}},
        )
        out = tmp_path / "o"
        assert run_cli(["negativity-threshold", "--config", cfg, "--out", out, "--no-plot"]) == 0
        assert load_run(out)["results"]["status"] == "never negative"

    def test_graph_scenario_crossing_matches_scan(self, tmp_path):
        cfg = write_config(
            tmp_path, "c.json", {"state": {"type": "graph", "scenario": "uniform"}, "xi_max": 10.0}
        )
        out = tmp_path / "o"
        assert run_cli(["negativity-threshold", "--config", cfg, "--out", out, "--no-plot"]) == 0
        results = load_run(out)["results"]
        assert results["status"] == "crossing"
        xi_star = results["xi_star"]
        lines = (out / "threshold_scan.csv").read_text().splitlines()[1:]
        for line in lines:
            xi, lhs, _, _, flag = line.split(",")
            assert (flag == "true") == (float(xi) < xi_star) or abs(float(xi) - xi_star) < 0.06

    def test_tiny_range_always_negative(self, tmp_path):
        cfg = write_config(
            tmp_path,
            "c.json",
            {"state": {"type": "single-mode", "s_db": 10.0, "n": 1.0, "gamma": 2.0}, "xi_max": 0.01},
        )
        out = tmp_path / "o"
        assert run_cli(["negativity-threshold", "--config", cfg, "--out", out, "--no-plot"]) == 0
        assert load_run(out)["results"]["status"] == "always negative in range"


class TestSubtractMap:
    def test_drift_table(self, tmp_path):
        cfg = write_config(
            tmp_path, "c.json", {"scenario": "overlapping", "xi": [0.0, 2.0, 20.0]}
        )
        out = tmp_path / "o"
        assert run_cli(["subtract-map", "--config", cfg, "--out", out, "--no-plot"]) == 0
        rows = load_run(out)["results"]["rows"]
        assert rows[0]["angle_to_start"] == 0.0
        at2 = rows[1]
        assert at2["components"][0] == pytest.approx(0.90775, abs=1e-5)
        assert at2["components"][3] == pytest.approx(0.41949, abs=1e-5)
        assert rows[2]["angle_to_loss"] < 0.01

    def test_csv_header_scales_with_modes(self, tmp_path):
        cfg = write_config(tmp_path, "c.json", {"scenario": "overlapping", "xi": [0.0]})
        out = tmp_path / "o"
        assert run_cli(["subtract-map", "--config", cfg, "--out", out, "--no-plot"]) == 0
        header = (out / "subtract_map.csv").read_text().splitlines()[0]
        assert header.split(",")[:4] == ["xi", "scale", "angle_to_start", "angle_to_loss"]
        assert len(header.split(",")) == 4 + 8


class TestOracleCheck:
    def test_default_suite_passes(self, tmp_path):
        cfg = write_config(tmp_path, "c.json", {"cutoff_single": 40, "cutoff_double": 16})
        out = tmp_path / "o"
        assert run_cli(["oracle-check", "--config", cfg, "--out", out]) == 0
        results = load_run(out)["results"]
        assert results["status"] == "pass"
        assert all(c["pass"] for c in results["checks"])

    def test_starved_cutoff_is_inconclusive(self, tmp_path):
        cfg = write_config(tmp_path, "c.json", {"cutoff_single": 3, "cutoff_double": 3})
        out = tmp_path / "o"
        assert run_cli(["oracle-check", "--config", cfg, "--out", out]) == 3


class TestRunRecordSchema:
    @pytest.mark.parametrize(
        "command, payload",
        [
            ("single-mode-sweep", {"squeezing_db": [2.0], "thermal_n": 1.0}),
            ("graph-demo", {"scenario": "vertex-loss", "grid": {"radius": 1.0, "step": 0.5}, "xi": [0.0]}),
            ("negativity-threshold", {"state": {"type": "single-mode", "s_db": 6.0, "n": 1.0}, "xi_max": 2.0}),
            ("subtract-map", {"scenario": "overlapping", "xi": [0.0, 1.0]}),
        ],
    )
    def test_every_emitted_record_validates(self, tmp_path, schema, command, payload):
        cfg = write_config(tmp_path, "c.json", payload)
        out = tmp_path / "o"
        assert run_cli([command, "--config", cfg, "--out", out, "--no-plot"]) == 0
        record = load_run(out)
        jsonschema.validate(record, {**schema, "$ref": "#/$defs/run_record"})
        jsonschema.validate(record["config"], schema)


class TestEntryPoint:
    def test_console_script_runs(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"scenario": "overlapping", "xi": [0.0]}))
        proc = subprocess.run(
            [sys.executable, "-m", "cvloss.cli", "subtract-map", "--config", str(cfg),
             "--out", str(tmp_path / "o"), "--no-plot"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0

    def test_config_error_message_on_stderr(self, tmp_path, capsys):
        cfg = write_config(tmp_path, "c.json", {"thermal_n": 1.0})
        assert run_cli(["single-mode-sweep", "--config", cfg, "--out", tmp_path / "o"]) == 2
        assert "config error" in capsys.readouterr().err
