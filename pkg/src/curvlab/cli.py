"""Command-line front end.

Exit codes: 0 when every check passes, 1 when a mathematical check fails,
2 for usage or input errors.  Reports are JSON by default; ``timings`` is the
only field allowed to differ between identical runs.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import enum
import io
import json
import math
import sys
import time
from typing import Any, Optional, Sequence

import numpy as np

from . import charts, certifier, models
from .errors import CurvlabError
from .lambda2 import integrand_F, spectral_of
from .tensor_core import (
    CurvatureDecomposition,
    decompose,
    invariants,
    pinching_classify,
    sharp_trace_inequalities,
)

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2
DEFAULT_SEED = 42

FD_CHECKS = ("bianchi", "weyl-conformal", "bach", "sigma2-divergence", "paneitz")
CATALOG_CHECKS = ("gauss-bonnet", "identities")
CHECKS = CATALOG_CHECKS + FD_CHECKS

# chart preset -> catalog model
PRESET_MODELS = {"stereo-s4": "s4", "cp2": "cp2", "s3xs1": "s3xs1", "s2xs2": "s2xs2"}


class UsageError(Exception):
    pass


def to_jsonable(obj: Any) -> Any:
    """Recursively convert numpy values, records and enums to plain JSON types."""
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if hasattr(obj, "_asdict"):
        return {k: to_jsonable(v) for k, v in obj._asdict().items()}
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _flatten(obj: Any, prefix: str = "", numeric_only: bool = True) -> list:
    rows = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            rows.extend(_flatten(v, f"{prefix}.{k}" if prefix else str(k), numeric_only))
    elif isinstance(obj, list):
        if all(isinstance(v, (int, float)) for v in obj):
            rows.extend((f"{prefix}[{i}]", v) for i, v in enumerate(obj))
    elif isinstance(obj, (int, float)) and not isinstance(obj, bool):
        rows.append((prefix, obj))
    elif not numeric_only:
        rows.append((prefix, obj))
    return rows


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["name", "value"])
        writer.writerows(_flatten(report["results"]))
        return buf.getvalue()
    lines = [f"command: {report['command']}"]
    lines += [f"{k}: {v!r}" for k, v in _flatten(report["results"], numeric_only=False)]
    lines.append("status: " + ("PASS" if report["summary"]["passed"] else "FAIL"))
    for v in report["summary"]["violations"]:
        lines.append(f"violation: {v}")
    return "\n".join(lines) + "\n"


def results_payload(report: dict) -> str:
    """Canonical serialisation of everything except ``timings``."""
    return json.dumps({k: v for k, v in report.items() if k != "timings"}, sort_keys=True)


# ---------------------------------------------------------------------------
# commands


def load_point(path: str) -> CurvatureDecomposition:
    """Read point data: ``{"riemann": ...}`` or ``{"weyl", "traceless_ricci", "scalar"}``."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read point data from {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("point data must be a JSON object")
    try:
        if "riemann" in data:
            return decompose(np.asarray(data["riemann"], dtype=float))
        if "scalar" in data:
            return CurvatureDecomposition.from_parts(
                weyl=data.get("weyl"), traceless_ricci=data.get("traceless_ricci"), scalar=float(data["scalar"])
            )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, CurvlabError):
            raise
        raise UsageError(f"malformed point data: {exc}") from exc
    raise UsageError("point data needs 'riemann' or 'scalar' (with optional 'weyl', 'traceless_ricci')")


def run_analyze(args) -> tuple:
    if args.input is not None:
        d = load_point(args.input)
    elif args.model is not None:
        d = models.get_model(args.model).decomposition
    else:
        raise UsageError("analyze needs --input FILE or --model NAME")
    rep = invariants(d)
    pin = pinching_classify(rep, args.tol if args.tol is not None else 1e-10)
    spec = spectral_of(d)
    f = integrand_F(d, args.alpha)
    results = {
        "invariants": rep.as_dict(),
        "spectral": spec,
        "pinching": {"tag": pin.tag, "reason": pin.reason},
        "integrand_F": f,
        "trace_inequalities": sharp_trace_inequalities(d),
    }
    return results, []


def run_certify(args) -> tuple:
    if args.samples < 1 or args.starts < 1:
        raise UsageError("--samples and --starts must be at least 1")
    tol = 1e-8 if args.tol is None else args.tol
    if tol < 0:
        raise UsageError("--tol must be non-negative")
    report = certifier.multistart_minimize(
        certifier.CertifyConfig(
            n_samples=args.samples, n_starts=args.starts, seed=args.seed, tol=tol, slice=args.slice
        )
    )
    results = report.to_dict()
    violations = [] if report.passed else [f"minimum {report.global_min_estimate!r} below -{tol}"]
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(to_jsonable(results), fh, indent=2)
            fh.write("\n")
    return results, violations


def _point(args, chart: charts.ChartMetric) -> np.ndarray:
    return chart.center.copy() if args.point is None else np.asarray(args.point, dtype=float)


def _function(text: Optional[str], default: charts.ScalarFunction) -> charts.ScalarFunction:
    if text is None:
        return default
    try:
        return charts.ScalarFunction.from_dict(json.loads(text))
    except json.JSONDecodeError as exc:
        raise UsageError(f"--w is not valid JSON: {exc}") from exc


def run_verify(args) -> tuple:
    if args.check not in CHECKS:
        raise UsageError(f"unknown check {args.check!r}; expected one of {CHECKS}")
    if args.check in CATALOG_CHECKS:
        name = PRESET_MODELS.get(args.preset, args.preset)
        m = models.get_model(name)
        tol = 1e-9 if args.tol is None else args.tol
        if args.check == "gauss-bonnet":
            gb = models.gauss_bonnet_check(m)
            residuals = {"residual": gb.residual, "residual_split": gb.residual_split}
            results = {"model": name, "gauss_bonnet": gb}
        else:
            suite = models.symmetric_identity_suite(m, args.alpha)
            residuals = {k: v for k, v in suite.items() if v is not None}
            results = {"model": name, "identities": suite}
        violations = [f"{k} = {v!r} exceeds {tol}" for k, v in residuals.items() if abs(v) > tol]
        return results, violations

    chart = charts.get_preset(args.preset)
    x = _point(args, chart)
    h = args.step
    tol = 10.0 * h * h if args.tol is None else args.tol
    if args.check == "bianchi":
        value = charts.bianchi_contraction_residual(chart, x, h)
        results = {"residual": value}
    elif args.check == "bach":
        b = charts.bach_fd(chart, x, h)
        value = float(np.linalg.norm(b))
        results = {"residual": value, "bach": b}
    elif args.check == "weyl-conformal":
        w = _function(args.w, charts.monomial(0.1, [1, 1, 0, 0]))
        r = charts.weyl_conformal_residual(chart, w, x, h)
        value = max(r.tensor_residual, r.norm_residual)
        results = {"residual": value, "detail": r, "w": w.to_dict()}
    elif args.check == "sigma2-divergence":
        w = _function(args.w, charts.ScalarFunction("sine", {"amplitude": 0.05, "axis": 0}))
        r = charts.sigma2_divergence_residual(chart, w, args.alpha, x, h)
        value = max(r.residual, r.m_identity_residual)
        results = {"residual": value, "detail": r, "w": w.to_dict()}
    else:
        u = _function(args.w, charts.monomial(1.0, [1, 1, 0, 0]))
        coarse = charts.paneitz_apply(chart, u, x, h)
        fine = charts.paneitz_apply(chart, u, x, h / 2.0)
        value = abs(coarse - fine)
        results = {"residual": value, "Pu": fine, "Pu_coarse": coarse, "u": u.to_dict()}
    results.update({"preset": args.preset, "point": x, "step": h, "tolerance": tol})
    violations = [] if value <= tol else [f"{args.check} residual {value!r} exceeds {tol!r}"]
    return results, violations


def run_model(args) -> tuple:
    m = models.get_model(args.name, radius=args.radius, length=args.length)
    head = {"model": m.name, "params": m.params, "euler_char": m.euler_char, "volume": m.volume}
    violations = []
    if args.report == "invariants":
        rep = invariants(m.decomposition)
        body = {
            "invariants": rep.as_dict(),
            "spectral": spectral_of(m.decomposition),
            "pinching": pinching_classify(rep)._asdict(),
        }
    elif args.report == "gauss-bonnet":
        gb = models.gauss_bonnet_check(m)
        body = {"gauss_bonnet": gb}
        if gb.residual > models.GB_TOL:
            violations.append(f"Gauss-Bonnet residual {gb.residual!r}")
    elif args.report == "identities":
        suite = models.symmetric_identity_suite(m)
        body = {"identities": suite}
        violations += [f"{k} = {v!r}" for k, v in suite.items() if v is not None and abs(v) > models.GB_TOL]
    else:
        hyp = models.theorem_hypothesis_check(m)
        body = {"hypotheses": hyp}
        if not hyp.consistent:
            violations.append("integral conditions disagree")
    return {**head, **body}, violations


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--tol", type=float, default=None)

    parser = argparse.ArgumentParser(prog="curvlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="invariants of one curvature tensor")
    p.add_argument("--input", help="point-data JSON file")
    p.add_argument("--model", choices=models.MODEL_NAMES)
    p.add_argument("--alpha", type=float, default=1.0)

    p = sub.add_parser("certify", parents=[common], help="multistart certificate for I >= 0")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--starts", type=int, default=200)
    p.add_argument("--slice", choices=certifier.SLICES, default="full")
    p.add_argument("--report", help="also write the full certificate JSON here")

    p = sub.add_parser("verify", parents=[common], help="identity checks on a preset")
    p.add_argument("--preset", required=True)
    p.add_argument("--check", required=True)
    p.add_argument("--step", type=float, default=1e-2)
    p.add_argument("--point", type=float, nargs=4)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--w", help='function JSON, e.g. \'{"family": "sine", "amplitude": 0.05, "axis": 0}\'')

    p = sub.add_parser("model", parents=[common], help="catalog data of a model space")
    p.add_argument("--name", required=True, choices=models.MODEL_NAMES)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--length", type=float, default=1.0)
    p.add_argument(
        "--report", choices=("invariants", "gauss-bonnet", "identities", "hypotheses"), default="invariants"
    )
    return parser


RUNNERS = {"analyze": run_analyze, "certify": run_certify, "verify": run_verify, "model": run_model}


def config_echo(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("command", "out", "format")}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    start = time.perf_counter()
    try:
        results, violations = RUNNERS[args.command](args)
    except (UsageError, CurvlabError) as exc:
        print(f"curvlab {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = to_jsonable(
        {
            "command": args.command,
            "config": config_echo(args),
            "results": results,
            "summary": {"passed": not violations, "violations": violations},
            "timings": {"seconds": time.perf_counter() - start},
        }
    )
    text = render(report, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_VIOLATION if violations else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
