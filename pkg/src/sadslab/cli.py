"""Command-line front end.

Every command writes a table (CSV by default, or JSON with ``--format json``)
to ``--out`` or standard output.  Exit codes: 0 success, 1 failed acceptance
criteria, 2 invalid input, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import acceptance, conformal, counterexample, profile, specfile
from .errors import ConvergenceError, ValidationError
from .metrics import MetricKind, RadialMetric, make_glued, make_hyperbolic, make_perturbed, make_sads
from .spheres import sphere_report, stability_spectrum

WORKERS_ENV = "SADSLAB_WORKERS"

ANALYZE_COLUMNS = ["r", "s", "area", "H", "K", "hawking", "cy_slack", "gauss_residual", "deltar_residual", "lambda1"]
PROFILE_COLUMNS = ["r", "A", "V", "H", "dVdA", "second_law", "mono23"]
FOLIATION_COLUMNS = ["r", "A", "F", "dFdA"]
CONFORMAL_COLUMNS = ["trial", "dilation", "S_u", "S_v", "abs_diff"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ValidationError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# argument helpers


def parse_range(text: str) -> np.ndarray:
    """``lo:hi:step`` with ``hi`` included when it lies on the lattice."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValidationError(f"range must be lo:hi:step, got {text!r}")
    try:
        lo, hi, step = (float(p) for p in parts)
    except ValueError as exc:
        raise ValidationError(f"range must be numeric, got {text!r}") from exc
    if not (math.isfinite(lo) and math.isfinite(hi) and step > 0 and hi >= lo):
        raise ValidationError(f"range needs finite lo <= hi and step > 0, got {text!r}")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(n)


def parse_grid(text: str) -> conformal.SphereGrid:
    try:
        n_theta, n_phi = (int(p) for p in text.lower().split("x"))
    except ValueError as exc:
        raise ValidationError(f"grid must look like 64x128, got {text!r}") from exc
    return conformal.make_grid(n_theta, n_phi)


def parse_perturbation(text: str) -> tuple[float, float]:
    try:
        a, c = (float(p) for p in text.split(":"))
    except ValueError as exc:
        raise ValidationError(f"perturbation term must be amplitude:rate, got {text!r}") from exc
    return a, c


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ValidationError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}") from exc
    if n < 1:
        raise ValidationError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}")
    return n


def ordered_map(func, items) -> list:
    """``map`` over a thread pool; results keep the input order."""
    n = worker_count()
    items = list(items)
    if n == 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(func, items))


def build_metric(args) -> RadialMetric:
    if args.spec:
        return specfile.load_metric(args.spec)
    kind = MetricKind(args.metric)
    if kind is MetricKind.HYPERBOLIC:
        return make_hyperbolic(args.boundary if args.boundary is not None else 0.0)
    if args.mass is None:
        raise ValidationError(f"--mass is required for --metric {kind.value}")
    if kind is MetricKind.EXACT_SADS:
        return make_sads(args.mass)
    if kind is MetricKind.PERTURBED_SADS:
        if not args.perturb:
            raise ValidationError("--metric perturbed needs at least one --perturb amplitude:rate")
        return make_perturbed(args.mass, [parse_perturbation(p) for p in args.perturb])
    spec = counterexample.SHIPPED_SPEC
    if args.mass != spec.exterior_mass:
        raise ValidationError("--metric glued uses the shipped gluing; pass other gluings with --spec")
    return make_glued(spec)


# ---------------------------------------------------------------------------
# output


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, str):
        return x
    return format(float(x), ".16e")


def _json_value(x):
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, dict):
        return {k: _json_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_value(v) for v in x]
    return x


def render(columns, rows, fmt: str, extra: dict | None = None) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
        return buf.getvalue()
    doc = dict(extra or {})
    doc["columns"] = list(columns)
    doc["rows"] = [list(r) for r in rows]
    return json.dumps(_json_value(doc), indent=2) + "\n"


def emit(text: str, out: str | None):
    if out:
        try:
            with open(out, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise ValidationError(f"cannot write {out}: {exc}") from exc
    else:
        sys.stdout.write(text)


def _default_radii(metric: RadialMetric, lo_offset: float, hi: float, step: float) -> np.ndarray:
    return parse_range(f"{metric.boundary_r + lo_offset}:{hi}:{step}")


# ---------------------------------------------------------------------------
# commands


def cmd_analyze(args) -> int:
    metric = build_metric(args)
    radii = parse_range(args.r) if args.r else _default_radii(metric, 0.5, 12.0, 0.25)
    metric.check_domain(radii)

    def row(r):
        rep = sphere_report(metric, float(r))
        lam1 = stability_spectrum(metric, float(r), 1).eigenvalue(1)
        return [rep.r, rep.s, rep.area, rep.H, rep.K, rep.hawking, rep.cy_slack, rep.gauss_residual, rep.deltar_residual, lam1]

    rows = ordered_map(row, radii)
    emit(render(ANALYZE_COLUMNS, rows, args.format, {"command": "analyze", "metric": metric.to_spec()}), args.out)
    return 0


def cmd_profile(args) -> int:
    metric = build_metric(args)
    radii = parse_range(args.r) if args.r else _default_radii(metric, 1.0, 14.0, 0.25)
    curve = profile.profile_curve(metric, radii, metric.kind.value)
    nan = float("nan")
    laws = profile.derivative_laws(curve) if len(curve) >= 5 else {"second_law": [], "mono23": [], "dVdA": []}
    lookup = {key: dict(vals) for key, vals in laws.items()}
    rows = [
        [r, a, v, h, lookup["dVdA"].get(a, nan), lookup["second_law"].get(a, nan), lookup["mono23"].get(a, nan)]
        for r, a, v, h in zip(curve.r, curve.A, curve.V, curve.H)
    ]
    extra = {"command": "profile", "metric": metric.to_spec()}
    if args.fit == "isoballs":
        const_fit = profile.isoballs_constant_fit(metric)
        extra["constant_fit"] = const_fit.to_dict()
        extra["constant_term"] = const_fit.coefficient("1")
        extra["reference_constant"] = profile.ISO_CONSTANT
        print(
            f"isoballs constant term: {const_fit.coefficient('1'):.12g} "
            f"(pi(1 + log pi) = {profile.ISO_CONSTANT:.12g})",
            file=sys.stderr,
        )
        if metric.mass > 0 and metric.kind is not MetricKind.SPLINE_GLUED:
            fit = profile.isoballs_fit(metric)
            extra["isoballs_fit"] = fit.to_dict()
            print(f"isoballs A^-1/2 coefficient: {fit.coefficient('x^-0.5'):.12g}", file=sys.stderr)
    emit(render(PROFILE_COLUMNS, rows, args.format, extra), args.out)
    return 0


def cmd_foliation(args) -> int:
    metric = build_metric(args)
    radii = parse_range(args.r) if args.r else _default_radii(metric, 0.5, 12.0, 0.25)
    rows = [[r, *vals] for r, vals in zip(radii, profile.foliation_mass_curve(metric, radii))]
    emit(render(FOLIATION_COLUMNS, rows, args.format, {"command": "foliation", "metric": metric.to_spec()}), args.out)
    return 0


def cmd_spectrum(args) -> int:
    metric = build_metric(args)
    radii = parse_range(args.r) if args.r else _default_radii(metric, 0.5, 12.0, 0.5)
    metric.check_domain(radii)
    reports = ordered_map(lambda r: stability_spectrum(metric, float(r), args.lmax), radii)
    columns = ["r"] + [f"lambda{ell}" for ell in range(args.lmax + 1)]
    rows = [[rep.r] + [lam for _, lam in rep.eigenvalues] for rep in reports]
    emit(render(columns, rows, args.format, {"command": "spectrum", "metric": metric.to_spec()}), args.out)
    return 0


def cmd_conformal_check(args) -> int:
    grid = parse_grid(args.grid)
    trials = conformal.invariance_trials(args.seed, args.trials, args.lmax, grid, (args.tmin, args.tmax))
    worst = max(t.abs_diff for t in trials)
    print(f"max |S(u)-S(v)| = {worst:.6e} over {len(trials)} trials")
    if args.out:
        rows = [[t.trial, t.dilation, t.s_u, t.s_v, t.abs_diff] for t in trials]
        extra = {"command": "conformal-check", "seed": args.seed, "grid": args.grid, "max_abs_diff": worst}
        emit(render(CONFORMAL_COLUMNS, rows, args.format, extra), args.out)
    return 0


def cmd_counterexample(args) -> int:
    glued = specfile.load_metric(args.spec) if args.spec else make_glued(counterexample.SHIPPED_SPEC)
    reports = [("counterexample", counterexample.analyze_metric(glued))]
    reports.append(("control", counterexample.control_demo(args.control_mass)))
    for name, rep in reports:
        print(f"{name}: {rep.verdict}", file=sys.stderr)
    if args.format == "json":
        doc = {"command": "counterexample"}
        doc.update({name: rep.as_dict() for name, rep in reports})
        emit(json.dumps(_json_value(doc), indent=2) + "\n", args.out)
        return 0
    columns = ["case", "min_scalar_R", "r_at_min", "renorm_volume", "boundary_area", "drift_star", "threshold_area", "verdict"]
    rows = [
        [name, r.min_scalar_R, r.r_at_min, r.renorm_volume, r.boundary_area, r.drift_star,
         float("nan") if r.threshold_area is None else r.threshold_area, r.verdict]
        for name, r in reports
    ]
    emit(render(columns, rows, "csv"), args.out)
    return 0


def cmd_accept(args) -> int:
    results = []
    for check in acceptance.CRITERIA:
        result = check()
        print(result.line(), flush=True)
        results.append(result)
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed")
    return 0 if passed == len(results) else 1


# ---------------------------------------------------------------------------


def _metric_options(p: argparse.ArgumentParser):
    g = p.add_argument_group("metric")
    g.add_argument("--metric", choices=[k.value for k in MetricKind], default="sads")
    g.add_argument("--mass", type=float, default=None)
    g.add_argument("--boundary", type=float, default=None, help="boundary radius (hyperbolic only)")
    g.add_argument("--perturb", action="append", metavar="A:C", help="perturbation term amplitude:rate (repeatable)")
    g.add_argument("--spec", help="JSON metric spec file (overrides the other metric flags)")


def _output_options(p: argparse.ArgumentParser):
    p.add_argument("--out", help="output path (default: standard output)")
    p.add_argument("--format", choices=["csv", "json"], default="csv")


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sadslab", description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=0, help="random seed for commands that sample")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", help="per-sphere report on a radius grid")
    _metric_options(p)
    p.add_argument("--r", help="radius range lo:hi:step")
    _output_options(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("profile", help="centered-ball isoperimetric profile")
    _metric_options(p)
    p.add_argument("--r", help="radius range lo:hi:step")
    p.add_argument("--fit", choices=["isoballs"], help="also fit the large-area volume expansion")
    _output_options(p)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("foliation", help="Hawking mass along the centered foliation")
    _metric_options(p)
    p.add_argument("--r", help="radius range lo:hi:step")
    _output_options(p)
    p.set_defaults(func=cmd_foliation)

    p = sub.add_parser("spectrum", help="stability operator eigenvalues")
    _metric_options(p)
    p.add_argument("--r", help="radius range lo:hi:step")
    p.add_argument("--lmax", type=int, default=4)
    _output_options(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("conformal-check", help="seeded conformal invariance check of S")
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--lmax", type=int, default=8)
    p.add_argument("--grid", default="64x128")
    p.add_argument("--tmin", type=float, default=0.5)
    p.add_argument("--tmax", type=float, default=2.0)
    _output_options(p)
    p.set_defaults(func=cmd_conformal_check)

    p = sub.add_parser("counterexample", help="glued counterexample and SAdS control")
    p.add_argument("--spec", help="glued metric spec (default: shipped gluing)")
    p.add_argument("--control-mass", type=float, default=1.0)
    _output_options(p)
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("accept", help="run the acceptance criteria")
    p.set_defaults(func=cmd_accept)
    return parser


def run(argv=None) -> int:
    try:
        args = make_parser().parse_args(argv)
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run())
