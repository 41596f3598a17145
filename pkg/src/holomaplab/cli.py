"""Batch experiment runner.

Commands:

    holomaplab run <config.json> [--output PATH] [--threads N]
    holomaplab emit <report.json> --format rows|structured [--output PATH]
    holomaplab parse-check <map-text>
    holomaplab list-builtins

A config is a JSON object:

    {
      "schema": 1,
      "map": "compose(henon(b=0.5), expcoord(c=0.1, k=2))",
      "domain": {"shape": "ball", "radius": 1.0},
      "task": "kappa-sup",
      "seed": 7,
      "params": { ... task-specific ... },
      "output": "report.json"          // optional
    }

Tasks: eval | jacobian | kappa-sup | refined-sup | bz-run | bz-sequence |
landau | rescaled-growth | counterexample.  Complex numbers in configs and
reports are [re, im] pairs.  All randomness flows from the single config
seed through named sub-seeds (sampler, newton, centers), so re-running a
config reproduces the payload byte for byte, independent of --threads.

Exit codes: 0 success, 2 validation error, 3 numerical failure (a partial
report with the error is still written).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__, algebra, conditioning, counterexamples, landau, renorm
from ._grammar import BUILTIN_SIGNATURES
from ._sampling import subseed
from .errors import (
    ConfigError,
    HolomapError,
    ParseError,
    PreconditionFailed,
    UnsupportedPayload,
)
from .mapkit import DomainSpec, DurenRudin as _DR, Harris as _HA, MapExpr, evaluate, jacobian, parse, to_text

SCHEMA_VERSION = 1

TASKS = (
    "eval",
    "jacobian",
    "kappa-sup",
    "refined-sup",
    "bz-run",
    "bz-sequence",
    "landau",
    "rescaled-growth",
    "counterexample",
)

_SAMPLER_DEFAULTS = {
    "radial_shells": 12,
    "points_per_shell": 96,
    "refine_steps": 20,
    "exclusion_tolerance": 1e-12,
}

_NEWTON_DEFAULTS = {
    "max_iterations": 40,
    "tolerance": 1e-8,
    "multistart_count": 8,
    "continuation_steps": 8,
    "domain_margin_min": 1e-4,
}

_TASK_PARAM_DEFAULTS = {
    "eval": {"point": None},
    "jacobian": {"point": None},
    "kappa-sup": dict(_SAMPLER_DEFAULTS),
    "refined-sup": dict(_SAMPLER_DEFAULTS, base_point=None),
    "bz-run": dict(_SAMPLER_DEFAULTS, C=None, grid_factor=0.9),
    "bz-sequence": dict(_SAMPLER_DEFAULTS, C=None, n_values=None, grid_factor=0.9),
    "landau": dict(
        _NEWTON_DEFAULTS,
        center_candidates=2,
        direction_count=None,
        growth_factor=1.05,
        center_refine_steps=1,
    ),
    "rescaled-growth": dict(
        _NEWTON_DEFAULTS,
        R_values=None,
        center_candidates=1,
        direction_count=None,
        growth_factor=1.05,
        center_refine_steps=0,
    ),
    "counterexample": {"centers_count": 100, "centers_scale": 2.0, "centers": None},
}

_REQUIRED = {
    "eval": ("point",),
    "jacobian": ("point",),
    "refined-sup": ("base_point",),
    "bz-run": ("C",),
    "bz-sequence": ("C", "n_values"),
    "rescaled-growth": ("R_values",),
}


def _probe_text(map_text: str, task: str) -> str:
    """bz-sequence map texts are templates over {n} / {1/n}; substitute n=1
    so they can be validated and dimension-checked like any other map."""
    if task == "bz-sequence":
        return map_text.replace("{n}", "1.0").replace("{1/n}", "1.0")
    return map_text


@dataclass
class ExperimentConfig:
    """Validated experiment description; to_dict/from_dict round-trip."""

    map_text: str
    task: str
    domain: DomainSpec
    seed: int
    params: dict = field(default_factory=dict)
    output: str | None = None

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "map": self.map_text,
            "task": self.task,
            "domain": {
                "shape": self.domain.shape,
                "radius": self.domain.radius,
                "dim": self.domain.dim,
            },
            "seed": self.seed,
            "params": dict(self.params),
            "output": self.output,
        }

    @staticmethod
    def from_dict(raw: dict) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        schema = raw.get("schema", SCHEMA_VERSION)
        if schema != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema version {schema}")
        unknown = set(raw) - {"schema", "map", "task", "domain", "seed", "params", "output"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "map" not in raw or "task" not in raw:
            raise ConfigError("config needs 'map' and 'task'")
        map_text = raw["map"]
        task = raw["task"]
        if task not in TASKS:
            raise ConfigError(f"unknown task {task!r}; expected one of {TASKS}")
        m = parse(_probe_text(map_text, task))  # ParseError => validation failure
        dom_raw = raw.get("domain") or {}
        if not isinstance(dom_raw, dict):
            raise ConfigError("domain must be an object")
        shape = dom_raw.get("shape", "ball")
        radius = float(dom_raw.get("radius", 1.0))
        dim = int(dom_raw.get("dim", m.dim))
        if dim != m.dim:
            raise ConfigError(f"domain dim {dim} does not match map dim {m.dim}")
        try:
            domain = DomainSpec(shape, radius, dim)
        except (ValueError, HolomapError) as exc:
            raise ConfigError(str(exc)) from exc
        seed = raw.get("seed")
        if seed is None:
            raise ConfigError("config needs an explicit integer 'seed'")
        if not isinstance(seed, int) or seed < 0:
            raise ConfigError("'seed' must be a nonnegative integer")
        defaults = _TASK_PARAM_DEFAULTS[task]
        params = dict(defaults)
        user_params = raw.get("params") or {}
        if not isinstance(user_params, dict):
            raise ConfigError("params must be an object")
        bad = set(user_params) - set(defaults)
        if bad:
            raise ConfigError(f"unknown params for task {task}: {sorted(bad)}")
        params.update(user_params)
        for key in _REQUIRED.get(task, ()):
            if params.get(key) is None:
                raise ConfigError(f"task {task} requires param {key!r}")
        return ExperimentConfig(map_text, task, domain, seed, params, raw.get("output"))


# --------------------------------------------------------------------------
# JSON encoding: complex -> [re, im], arrays -> lists, +inf -> "inf"


def _enc(obj):
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        c = complex(obj)
        return [c.real, c.imag]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return "inf" if math.isinf(x) else x
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_enc(x) for x in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [_enc(x) for x in obj]
    if isinstance(obj, dict):
        return {str(k): _enc(v) for k, v in obj.items()}
    return obj


def _point_from(param, k) -> np.ndarray:
    if not isinstance(param, (list, tuple)) or len(param) != k:
        raise ConfigError(f"point must be a list of {k} [re, im] pairs")
    out = np.empty(k, dtype=np.complex128)
    for i, entry in enumerate(param):
        if not isinstance(entry, (list, tuple)) or len(entry) != 2:
            raise ConfigError("each coordinate must be an [re, im] pair")
        out[i] = complex(float(entry[0]), float(entry[1]))
    return out


def _sampler_from(params, seed) -> conditioning.SamplerConfig:
    return conditioning.SamplerConfig(
        radial_shells=int(params["radial_shells"]),
        points_per_shell=int(params["points_per_shell"]),
        rng_seed=subseed(seed, "sampler"),
        refine_steps=int(params["refine_steps"]),
        exclusion_tolerance=float(params["exclusion_tolerance"]),
    )


def _newton_from(params, seed) -> landau.NewtonConfig:
    return landau.NewtonConfig(
        max_iterations=int(params["max_iterations"]),
        tolerance=float(params["tolerance"]),
        multistart_count=int(params["multistart_count"]),
        continuation_steps=int(params["continuation_steps"]),
        domain_margin_min=float(params["domain_margin_min"]),
        rng_seed=subseed(seed, "newton"),
    )


def _cert_payload(cert: landau.MembershipCertificate) -> dict:
    return {
        "target": _enc(cert.target),
        "preimage": _enc(cert.preimage),
        "residual": _enc(cert.residual),
        "domain_margin": _enc(cert.domain_margin),
    }


def _estimate_payload(est: landau.LandauEstimate) -> dict:
    return {
        "center": _enc(est.center),
        "r_lo": _enc(est.r_lo),
        "r_hi": _enc(est.r_hi),
        "r_hi_label": est.r_hi_label,
        "directions_tested": est.directions_tested,
        "certificates": [_cert_payload(c) for c in est.certificates],
        "shells": [[_enc(r), bool(ok)] for r, ok in est.shell_history],
    }


def _step_payload(step: renorm.RenormStep) -> dict:
    check = step.bound_check
    return {
        "lambda": _enc(step.lambda_),
        "base_point": _enc(step.base_point),
        "b_matrix": _enc(step.b_matrix),
        "psi": to_text(step.psi),
        "validity_radius": _enc(step.validity_radius),
        "bound_check": {
            "max_jacobian_norm": _enc(check.max_jacobian_norm),
            "bound": _enc(check.bound),
            "passed": bool(check.passed),
            "worst_point": _enc(check.worst_point),
            "shift_max": _enc(check.shift_max),
            "shift_limit": _enc(check.shift_limit),
            "shift_ok": bool(check.shift_ok),
        },
    }


def _sequence_map_builder(template: str, cfg_map: MapExpr):
    """bz-sequence families come from the map text with {n} / {1/n}
    placeholders; a placeholder-free text is a constant family."""

    def build(n: int) -> MapExpr:
        text = template.replace("{n}", repr(float(n))).replace("{1/n}", repr(1.0 / n))
        return parse(text)

    return build


def _run_task(cfg: ExperimentConfig, threads: int) -> dict:
    m = parse(_probe_text(cfg.map_text, cfg.task))
    params = cfg.params
    task = cfg.task
    if task == "eval":
        z = _point_from(params["point"], m.dim)
        return {"point": _enc(z), "value": _enc(evaluate(m, z))}
    if task == "jacobian":
        z = _point_from(params["point"], m.dim)
        jet = jacobian(m, z)
        return {"point": _enc(z), "value": _enc(jet.value), "jacobian": _enc(jet.jacobian)}
    if task == "kappa-sup":
        report = conditioning.sup_kappa(m, cfg.domain, _sampler_from(params, cfg.seed), threads)
        return {
            "sup_estimate": _enc(report.sup_estimate),
            "argmax_point": _enc(report.argmax_point),
            "samples_used": report.samples_used,
            "skipped_singular": report.skipped_singular,
            "norm": report.norm_name,
        }
    if task == "refined-sup":
        a = _point_from(params["base_point"], m.dim)
        value = conditioning.refined_sup(m, a, _sampler_from(params, cfg.seed), threads)
        return {"base_point": _enc(a), "sup": _enc(value), "norm": algebra.NORM_NAME}
    if task == "bz-run":
        step = renorm.bz_step(
            m, float(params["C"]), _sampler_from(params, cfg.seed),
            grid_factor=float(params["grid_factor"]), threads=threads,
        )
        return _step_payload(step)
    if task == "bz-sequence":
        n_values = [int(n) for n in params["n_values"]]
        steps = renorm.bz_sequence(
            _sequence_map_builder(cfg.map_text, m), n_values,
            float(params["C"]), _sampler_from(params, cfg.seed),
            grid_factor=float(params["grid_factor"]), threads=threads,
        )
        return {
            "series": [
                dict(_step_payload(step), n=n) for n, step in zip(n_values, steps)
            ]
        }
    if task == "landau":
        est = landau.landau_estimate(
            m, cfg.domain, _newton_from(params, cfg.seed),
            center_candidates=int(params["center_candidates"]),
            direction_count=(None if params["direction_count"] is None
                             else int(params["direction_count"])),
            growth_factor=float(params["growth_factor"]),
            center_refine_steps=int(params["center_refine_steps"]),
            threads=threads,
        )
        return _estimate_payload(est)
    if task == "rescaled-growth":
        series = landau.rescaled_growth(
            m, [float(r) for r in params["R_values"]], _newton_from(params, cfg.seed),
            center_candidates=int(params["center_candidates"]),
            direction_count=(None if params["direction_count"] is None
                             else int(params["direction_count"])),
            growth_factor=float(params["growth_factor"]),
            center_refine_steps=int(params["center_refine_steps"]),
            threads=threads,
        )
        return {"series": [{"R": _enc(r), "r_times_rlo": _enc(v)} for r, v in series]}
    if task == "counterexample":
        if params["centers"] is not None:
            centers = [
                (complex(c[0][0], c[0][1]), complex(c[1][0], c[1][1]))
                for c in params["centers"]
            ]
        else:
            count = int(params["centers_count"])
            scale = float(params["centers_scale"])
            rng = np.random.default_rng(
                np.random.SeedSequence([subseed(cfg.seed, "centers") & (2**63 - 1)])
            )
            raw = scale * rng.standard_normal((count, 4))
            centers = [
                (complex(r[0], r[1]), complex(r[2], r[3])) for r in raw
            ]
        bound = counterexamples.certify_no_ball(m, centers)
        witnesses = []
        if isinstance(m, _HA):
            delta_test = bound.value * (1.0 + 1e-6)
            for a0, b0 in centers:
                w = counterexamples.harris_witness(m.n, delta_test, a0, b0)
                witnesses.append({
                    "center": _enc([a0, b0]),
                    "zeta": _enc(w.zeta),
                    "violation": _enc(w.violation),
                })
        elif isinstance(m, _DR):
            for u, v in centers:
                w = counterexamples.duren_rudin_witness(m.delta, u, v)
                witnesses.append({
                    "center": _enc([u, v]),
                    "theta_star": _enc(w.theta_star),
                    "circle_value": _enc(w.circle_value),
                })
        return {
            "bound": _enc(bound.value),
            "label": bound.label,
            "witness_count": bound.witness_count,
            "map": bound.map_text,
            "witnesses": witnesses,
        }
    raise ConfigError(f"unhandled task {task}")


def run(config_path: str, output: str | None = None, threads: int = 1) -> int:
    """Execute a config file; returns the process exit code."""
    try:
        with open(config_path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        cfg = ExperimentConfig.from_dict(raw)
    except (ConfigError, ParseError, PreconditionFailed, ValueError) as exc:
        print(f"error: invalid config: {exc}", file=sys.stderr)
        return 2

    out_path = output or cfg.output or (str(config_path).rsplit(".", 1)[0] + ".report.json")
    report = {
        "schema": SCHEMA_VERSION,
        "artifact": {"name": "holomaplab", "version": __version__},
        "norm": algebra.NORM_NAME,
        "config": cfg.to_dict(),
        "payload": None,
        "error": None,
        "wall_time_s": None,
    }
    start = time.perf_counter()
    try:
        report["payload"] = _run_task(cfg, threads)
        code = 0
    except (ConfigError, PreconditionFailed) as exc:
        print(f"error: invalid config: {exc}", file=sys.stderr)
        return 2
    except HolomapError as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        code = 3
    report["wall_time_s"] = time.perf_counter() - start
    try:
        with open(out_path, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        print(f"error: cannot write report: {exc}", file=sys.stderr)
        return 2
    return code


def emit_series(report: dict, fmt: str) -> str:
    """Render a report's series payload as csv rows or as structured JSON."""
    payload = report.get("payload")
    if payload is None:
        raise UnsupportedPayload("report has no payload")
    if fmt == "structured":
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if fmt != "rows":
        raise UnsupportedPayload(f"unknown format {fmt!r}")
    task = (report.get("config") or {}).get("task")
    if task == "bz-sequence":
        lines = ["n,lambda"]
        lines += [f"{row['n']},{row['lambda']}" for row in payload["series"]]
    elif task == "rescaled-growth":
        lines = ["R,r_times_rlo"]
        lines += [f"{row['R']},{row['r_times_rlo']}" for row in payload["series"]]
    elif task == "landau":
        lines = ["radius,all_certified"]
        lines += [f"{r},{1 if ok else 0}" for r, ok in payload["shells"]]
    else:
        raise UnsupportedPayload(f"task {task!r} has no rows series")
    return "\n".join(lines) + "\n"


def emit(report_path: str, fmt: str, output: str | None = None) -> int:
    try:
        with open(report_path, "r", encoding="utf-8") as fh:
            report = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read report: {exc}", file=sys.stderr)
        return 2
    try:
        text = emit_series(report, fmt)
    except UnsupportedPayload as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def parse_check(text: str) -> int:
    try:
        m = parse(text)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"ok: k={m.dim}")
    print(to_text(m))
    return 0


def list_builtins() -> int:
    for sig in BUILTIN_SIGNATURES:
        print(sig)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="holomaplab",
        description="Batch experiments on holomorphic self-maps of complex balls.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a config file and write a report")
    p_run.add_argument("config")
    p_run.add_argument("--output", "-o", default=None)
    p_run.add_argument("--threads", type=int, default=1)

    p_emit = sub.add_parser("emit", help="render a report's series payload")
    p_emit.add_argument("report")
    p_emit.add_argument("--format", choices=("rows", "structured"), default="rows")
    p_emit.add_argument("--output", "-o", default=None)

    p_check = sub.add_parser("parse-check", help="validate a map expression")
    p_check.add_argument("text")

    sub.add_parser("list-builtins", help="list map constructors")

    args = parser.parse_args(argv)
    if args.command == "run":
        return run(args.config, args.output, args.threads)
    if args.command == "emit":
        return emit(args.report, args.format, args.output)
    if args.command == "parse-check":
        return parse_check(args.text)
    if args.command == "list-builtins":
        return list_builtins()
    return 2


if __name__ == "__main__":
    sys.exit(main())
