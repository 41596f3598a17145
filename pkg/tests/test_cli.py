import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from holomaplab.cli import ExperimentConfig, emit_series, run
from holomaplab.errors import UnsupportedPayload

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def write_config(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return path


def load_report(path):
    return json.loads(Path(path).read_text())


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "holomaplab", *args],
        capture_output=True, text=True,
    )


class TestRun:
    def test_identity_landau(self, tmp_path):
        cfg = write_config(tmp_path, "c.json", {
            "schema": 1,
            "map": "identity(k=2)",
            "task": "landau",
            "seed": 3,
            "params": {"direction_count": 64, "growth_factor": 1.01,
                       "center_candidates": 1, "center_refine_steps": 0},
        })
        out = tmp_path / "r.json"
        assert run(str(cfg), str(out)) == 0
        report = load_report(out)
        assert report["payload"]["r_lo"] >= 0.99
        assert report["norm"] == "spectral"

    def test_harris_counterexample(self, tmp_path):
        cfg = write_config(tmp_path, "c.json", {
            "schema": 1,
            "map": "harris(n=3)",
            "domain": {"shape": "polydisc", "radius": 1.0},
            "task": "counterexample",
            "seed": 3,
            "params": {"centers_count": 20},
        })
        out = tmp_path / "r.json"
        assert run(str(cfg), str(out)) == 0
        payload = load_report(out)["payload"]
        assert payload["bound"] == pytest.approx(math.sqrt(2 / 3), rel=1e-12)
        assert payload["label"] == "certified"
        assert len(payload["witnesses"]) == 20

    def test_malformed_map_exits_2(self, tmp_path):
        cfg = write_config(tmp_path, "c.json", {
            "schema": 1, "map": "henon(b=0.5", "task": "eval",
            "seed": 1, "params": {"point": [[0, 0], [0, 0]]},
        })
        result = run_cli("run", str(cfg))
        assert result.returncode == 2
        assert "position" in result.stderr

    def test_missing_seed_exits_2(self, tmp_path):
        cfg = write_config(tmp_path, "c.json", {
            "schema": 1, "map": "identity(k=2)", "task": "landau",
        })
        assert run(str(cfg)) == 2

    def test_numerical_failure_exits_3_with_partial_report(self, tmp_path):
        # refined-sup at a singular base point
        cfg = write_config(tmp_path, "c.json", {
            "schema": 1,
            "map": "(z1^2, z2)",
            "task": "refined-sup",
            "seed": 2,
            "params": {"base_point": [[0, 0], [0, 0]]},
        })
        out = tmp_path / "r.json"
        assert run(str(cfg), str(out)) == 3
        report = load_report(out)
        assert report["payload"] is None
        assert report["error"]["type"] == "SingularBasePoint"

    def test_config_echo_round_trips(self, tmp_path):
        cfg_dict = {
            "schema": 1,
            "map": "henon(b=0.5)",
            "task": "eval",
            "seed": 9,
            "params": {"point": [[0.2, 0.0], [0.1, 0.0]]},
        }
        cfg = write_config(tmp_path, "c.json", cfg_dict)
        out = tmp_path / "r.json"
        assert run(str(cfg), str(out)) == 0
        echoed = load_report(out)["config"]
        assert ExperimentConfig.from_dict(echoed) == ExperimentConfig.from_dict(cfg_dict)

    def test_eval_payload_value(self, tmp_path):
        cfg = write_config(tmp_path, "c.json", {
            "schema": 1, "map": "henon(b=0.5)", "task": "eval",
            "seed": 1, "params": {"point": [[0.2, 0.0], [0.1, 0.0]]},
        })
        out = tmp_path / "r.json"
        assert run(str(cfg), str(out)) == 0
        value = load_report(out)["payload"]["value"]
        assert value[0] == pytest.approx([0.09, 0.0], abs=1e-15)
        assert value[1] == pytest.approx([0.2, 0.0], abs=0)


class TestEmit:
    def test_bz_sequence_rows(self, tmp_path):
        out = tmp_path / "r.json"
        assert run(str(CONFIG_DIR / "bz_sequence_linear.json"), str(out)) == 0
        text = emit_series(load_report(out), "rows")
        lines = text.strip().splitlines()
        assert lines[0] == "n,lambda"
        assert lines[1:] == [f"{n},{float(n)}" for n in range(1, 6)]

    def test_rescaled_growth_rows(self, tmp_path):
        out = tmp_path / "r.json"
        assert run(str(CONFIG_DIR / "rescaled_growth_identity.json"), str(out)) == 0
        lines = emit_series(load_report(out), "rows").strip().splitlines()
        assert lines[0] == "R,r_times_rlo"
        values = [tuple(map(float, ln.split(","))) for ln in lines[1:]]
        for R, v in values:
            assert v == pytest.approx(R, rel=0.02)

    def test_landau_rows_end_near_sigma_min(self, tmp_path):
        out = tmp_path / "r.json"
        assert run(str(CONFIG_DIR / "landau_linear.json"), str(out)) == 0
        lines = emit_series(load_report(out), "rows").strip().splitlines()
        assert lines[0] == "radius,all_certified"
        certified = [float(ln.split(",")[0]) for ln in lines[1:] if ln.endswith(",1")]
        assert certified
        assert certified[-1] == pytest.approx(0.5, rel=0.05)

    def test_structured_mirrors_payload(self, tmp_path):
        out = tmp_path / "r.json"
        assert run(str(CONFIG_DIR / "eval_henon.json"), str(out)) == 0
        report = load_report(out)
        assert json.loads(emit_series(report, "structured")) == report["payload"]

    def test_unsupported_payload(self, tmp_path):
        out = tmp_path / "r.json"
        assert run(str(CONFIG_DIR / "eval_henon.json"), str(out)) == 0
        with pytest.raises(UnsupportedPayload):
            emit_series(load_report(out), "rows")

    def test_emit_cli_roundtrip(self, tmp_path):
        out = tmp_path / "r.json"
        assert run(str(CONFIG_DIR / "bz_sequence_linear.json"), str(out)) == 0
        result = run_cli("emit", str(out), "--format", "rows")
        assert result.returncode == 0
        assert result.stdout.startswith("n,lambda")


class TestSmallCommands:
    def test_parse_check_ok(self):
        result = run_cli("parse-check", "compose(henon(b=0.5), expcoord(c=0.1, k=2))")
        assert result.returncode == 0
        assert "k=2" in result.stdout

    def test_parse_check_error_position(self):
        result = run_cli("parse-check", "henon(b=)")
        assert result.returncode == 2
        assert "position" in result.stderr

    def test_list_builtins(self):
        result = run_cli("list-builtins")
        assert result.returncode == 0
        assert "henon(b=<complex>)" in result.stdout
        assert "compose(<map>, <map>)" in result.stdout


class TestBundledConfigsValidate:
    @pytest.mark.parametrize("path", sorted(CONFIG_DIR.glob("*.json")), ids=lambda p: p.stem)
    def test_config_parses(self, path):
        ExperimentConfig.from_dict(json.loads(path.read_text()))
