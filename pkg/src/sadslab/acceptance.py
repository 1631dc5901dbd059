"""The thirteen acceptance criteria as runnable checks.

Each check returns a :class:`Criterion` carrying the measured quantity, the
tolerance it is judged against and the verdict.  Thresholds are fixed here
and are never adjusted to make a check pass.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import conformal, fitting
from .counterexample import VERDICT_BEATEN, VERDICT_SURVIVE, control_demo, counterexample_demo
from .metrics import curvature, make_hyperbolic, make_sads
from .profile import ISO_CONSTANT, derivative_laws, isoballs_constant_fit, isoballs_fit, profile_by_area, radius_for_area
from .spheres import sphere_report, stability_spectrum

SIXTEEN_PI = 16.0 * math.pi
ISOBALLS_LEADING = -8.0 * math.pi**1.5


@dataclass(frozen=True)
class Criterion:
    number: int
    title: str
    measured: str
    tolerance: str
    passed: bool

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:2d}. {self.title}: {self.measured} (tolerance {self.tolerance})"


def _sads_radii_for_s(m: float, s_values):
    chart = make_sads(m).chart
    return [float(chart.r_of_s(s)) for s in s_values]


def hawking_constancy() -> Criterion:
    worst = 0.0
    for m in (0.5, 1.0, 2.0):
        metric = make_sads(m)
        s = np.linspace(2 * m + 0.1, 100.0, 200)
        for r in _sads_radii_for_s(m, s):
            worst = max(worst, abs(sphere_report(metric, r).hawking - m))
    return Criterion(1, "Hawking mass constancy on SAdS", f"max |m_H - m| = {worst:.3e}", "1e-09", worst < 1e-9)


def scalar_curvature_exact() -> Criterion:
    worst = 0.0
    for m in (0.5, 1.0, 2.0):
        metric = make_sads(m)
        for r in np.linspace(metric.boundary_r + 0.5, 12.0, 120):
            worst = max(worst, abs(curvature(metric, float(r)).scalar_R + 6.0))
    return Criterion(2, "R = -6 on SAdS", f"max |R + 6| = {worst:.3e}", "1e-06", worst < 1e-6)


def hyperbolic_constant() -> Criterion:
    c = isoballs_constant_fit(make_hyperbolic()).coefficient("1")
    err = abs(c - ISO_CONSTANT)
    return Criterion(
        3, "hyperbolic profile constant pi(1 + log pi)", f"fitted {c:.8f}, error {err:.3e}", "1e-03", err < 1e-3
    )


def isoballs_mass_coefficient() -> Criterion:
    parts, ok = [], True
    for m in (1.0, 2.0):
        coef = isoballs_fit(make_sads(m)).coefficient("x^-0.5")
        rel = abs(coef / (ISOBALLS_LEADING * m) - 1.0)
        ok &= rel < 0.02
        parts.append(f"m={m:g}: {coef:.4f} (rel {rel:.2e})")
    return Criterion(4, "A^-1/2 coefficient -8 pi^(3/2) m", "; ".join(parts), "2%", ok)


def spectral_gap() -> Criterion:
    metric = make_sads(1.0)
    ratios = {r: stability_spectrum(metric, r, 1).eigenvalue(1) * math.exp(3 * r) / 48.0 for r in (8.0, 10.0)}
    ok = 0.95 <= ratios[8.0] <= 1.05 and 0.97 <= ratios[10.0] <= 1.03
    return Criterion(
        5,
        "spectral gap lambda_1 e^{3r} / 48m",
        f"r=8: {ratios[8.0]:.5f}; r=10: {ratios[10.0]:.5f}",
        "[0.95, 1.05] at r=8, [0.97, 1.03] at r=10",
        ok,
    )


def sixteen_pi_law(m: float = 1.0) -> Criterion:
    metric = make_sads(m)
    areas = np.logspace(4.0, 6.0, 9)
    H = {a: sphere_report(metric, radius_for_area(metric, a)).H for a in areas}
    worst = 0.0
    for a1, a2 in itertools.combinations(areas, 2):
        ratio = (H[a1] ** 2 - H[a2] ** 2) / (1.0 / a1 - 1.0 / a2) / SIXTEEN_PI
        worst = max(worst, abs(ratio - 1.0))
    return Criterion(
        6,
        f"(H1^2 - H2^2)/(1/A1 - 1/A2) vs 16 pi on [1e4, 1e6], m={m:g}",
        f"max relative deviation {worst:.4f}",
        "1%",
        worst < 0.01,
    )


def second_derivative_law(m: float = 1.0) -> Criterion:
    metric = make_sads(m)
    areas = 1.0e5 * np.exp(0.05 * np.arange(-4, 5))
    rows = derivative_laws(profile_by_area(metric, areas))["second_law"]
    a, value = min(rows, key=lambda row: abs(math.log(row[0] / 1.0e5)))
    rel = abs(value / SIXTEEN_PI - 1.0)
    return Criterion(
        7,
        f"2 V'' V'^-3 A^2 vs 16 pi at A = 1e5, m={m:g}",
        f"value/16pi = {value / SIXTEEN_PI:.4f} at A = {a:.4g}",
        "1%",
        rel < 0.01,
    )


def mono23_increasing() -> Criterion:
    metric = make_sads(1.0)
    areas = np.logspace(3.0, 7.0, 81)
    rows = derivative_laws(profile_by_area(metric, areas))["mono23"]
    vals = np.array([v for a, v in rows if a >= 1.0e3])
    steps = np.diff(vals)
    return Criterion(
        8,
        "V'^-2 - 23 pi / A strictly increasing for A >= 1e3",
        f"{len(vals)} samples, min step {steps.min():.3e}",
        "all steps > 0",
        bool(np.all(steps > 0)),
    )


def conformal_invariance(seed: int = 42) -> Criterion:
    trials = conformal.invariance_trials(seed, trials=100, lmax=8, grid=conformal.make_grid(64, 128))
    worst = max(t.abs_diff for t in trials)
    return Criterion(
        9, "conformal invariance of S (100 trials, 64x128)", f"max |S(u) - S(v)| = {worst:.3e}", "1e-06", worst < 1e-6
    )


def disk_plane_identity() -> Criterion:
    worst = max(abs(conformal.disk_plane_residual(s)) for s in (0.1, 0.5, 0.9, 0.99))
    return Criterion(10, "disk-plane conformal identity", f"max residual {worst:.3e}", "1e-12", worst < 1e-12)


def counterexample_mechanism() -> Criterion:
    glued = counterexample_demo()
    control = control_demo(1.0)
    ok = (
        glued.min_scalar_R < -6.0
        and glued.drift_star < 0
        and glued.verdict == VERDICT_BEATEN
        and control.drift_star > 0
        and control.verdict == VERDICT_SURVIVE
    )
    return Criterion(
        11,
        "counterexample mechanism",
        f"glued: min R {glued.min_scalar_R:.3f}, (*) {glued.drift_star:.3f}, A* {glued.threshold_area:.4g}; "
        f"SAdS control: (*) {control.drift_star:.3f}",
        "min R < -6, (*) < 0 with verdict; control (*) > 0",
        ok,
    )


def mean_curvature_expansion(m: float = 1.0) -> Criterion:
    metric = make_sads(m)
    r = np.arange(6.0, 12.0 + 1e-9, 0.1)
    h = [sphere_report(metric, float(x)).H_minus_2 for x in r]
    basis = [fitting.exp_decay(2), fitting.exp_decay(3), fitting.exp_decay(4)]
    fit = fitting.fit_expansion(np.column_stack([r, h]), basis)
    c2, c3 = fit.coefficient("exp(-2x)"), fit.coefficient("exp(-3x)")
    rel2, rel3 = abs(c2 / 4.0 - 1.0), abs(c3 / (-16.0 * m) - 1.0)
    return Criterion(
        12,
        "H - 2 expansion on r in [6, 12]",
        f"e^-2r coef {c2:.6f} (rel {rel2:.2e}); e^-3r coef {c3:.4f} (rel {rel3:.2e})",
        "1% and 5%",
        rel2 < 0.01 and rel3 < 0.05,
    )


def cy_slack_closed_form() -> Criterion:
    worst = 0.0
    for m in (0.5, 1.0, 2.0):
        metric = make_sads(m)
        s = np.linspace(2 * m + 0.1, 100.0, 200)
        for r in _sads_radii_for_s(m, s):
            rep = sphere_report(metric, r)
            bracket = SIXTEEN_PI - (rep.H**2 - 4.0) * rep.area
            exact = 32.0 * math.pi * m / rep.s
            worst = max(worst, abs(bracket / exact - 1.0))
    return Criterion(13, "16 pi - (H^2 - 4) A = 32 pi m / s", f"max relative error {worst:.3e}", "1e-09", worst < 1e-9)


CRITERIA: tuple[Callable[[], Criterion], ...] = (
    hawking_constancy,
    scalar_curvature_exact,
    hyperbolic_constant,
    isoballs_mass_coefficient,
    spectral_gap,
    sixteen_pi_law,
    second_derivative_law,
    mono23_increasing,
    conformal_invariance,
    disk_plane_identity,
    counterexample_mechanism,
    mean_curvature_expansion,
    cy_slack_closed_form,
)


def run_all() -> list[Criterion]:
    return [check() for check in CRITERIA]
