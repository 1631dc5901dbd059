"""Isoperimetric profile of centered balls and its asymptotic diagnostics.

Volumes are measured between ``dM`` and ``S_r``.  Large-area quantities are
never formed as ``V(A) - A/2 + pi log A``; instead the *volume excess*

    D(r) = V(r) - V_hyp(A(r))
         = -V_hyp(A(r0)) + int_{r0}^{r} 4 pi phi^2 (1 - phi' / sqrt(1 + phi^2)) dt

is integrated directly (the integrand is built from the angular defect) and
the hyperbolic remainder ``V_hyp(A) - (A/2 - pi log A + pi (1 + log pi))`` is
used in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from . import fitting
from .errors import ConvergenceError, ValidationError
from .fitting import ExpansionFit
from .metrics import MetricKind, RadialMetric
from .spheres import sphere_report

FOUR_PI = 4.0 * math.pi
ISO_CONSTANT = math.pi * (1.0 + math.log(math.pi))
VOLUME_TOL = 1.0e-10
RENORM_WINDOW = (8.0, 14.0)
RENORM_STEP = 0.25
RENORM_TOL = 1.0e-4
ISOBALLS_WINDOW = (4.0, 10.0)


@dataclass(frozen=True)
class ProfileCurve:
    """Centered-ball profile samples, one row per radius."""

    r: np.ndarray
    A: np.ndarray
    V: np.ndarray
    H: np.ndarray
    metric_id: str = ""

    def __len__(self):
        return len(self.r)

    def rows(self):
        return list(zip(self.A, self.V, self.H, self.r))


@dataclass(frozen=True)
class ProfileSummary:
    renorm_volume: float
    drift_star: float
    isoballs_fit: ExpansionFit | None = field(default=None)


def _glue_points(metric: RadialMetric):
    if metric.kind is MetricKind.SPLINE_GLUED:
        return list(metric.payload["gluing"]["glue_interval"])
    return []


def _integrate(func, a, b, metric, what, tol_scale=VOLUME_TOL):
    """Adaptive quadrature on [a, b], split at glue points and unit pieces."""
    if b <= a:
        return 0.0
    inner = _glue_points(metric) + list(np.arange(math.floor(a) + 1.0, b, 1.0))
    # cuts closer than this to an end would leave slivers quad cannot resolve
    slack = 1e-9 * max(1.0, abs(b))
    cuts = sorted({a, b, *(p for p in inner if a + slack < p < b - slack)})
    total = err_total = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        val, err = integrate.quad(func, lo, hi, epsabs=0.0, epsrel=1.0e-13, limit=200)
        total += val
        err_total += err
    if not math.isfinite(total) or err_total > tol_scale * (1.0 + abs(total)):
        raise ConvergenceError(f"{what} quadrature did not converge (err={err_total:.3g})")
    return total


def _sinh_minus_x(x):
    if abs(x) < 1.0e-2:
        x2 = x * x
        return x * x2 * (1.0 / 6.0 + x2 * (1.0 / 120.0 + x2 / 5040.0))
    return math.sinh(x) - x


def hyperbolic_reference(A: float) -> float:
    """Volume of the hyperbolic ball whose boundary has area ``A``."""
    if not A > 0:
        raise ValidationError(f"area must be positive, got {A!r}")
    rho = math.asinh(math.sqrt(A / FOUR_PI))
    return math.pi * _sinh_minus_x(2.0 * rho)


def asymptotic_reference(A):
    """``A/2 - pi log A + pi (1 + log pi)``."""
    A = np.asarray(A, dtype=float)
    return A / 2.0 - math.pi * np.log(A) + ISO_CONSTANT


def reference_remainder(A):
    """``hyperbolic_reference(A) - asymptotic_reference(A)`` in closed form.

    With ``sinh(rho)^2 = A / 4 pi`` this is ``-pi e^{-2rho} + 2 pi log(1 - e^{-2rho})``.
    """
    A = np.asarray(A, dtype=float)
    sh = np.sqrt(A / FOUR_PI)
    e2 = 1.0 / (sh + np.sqrt(1.0 + sh * sh)) ** 2
    return -math.pi * e2 + 2.0 * math.pi * np.log1p(-e2)


def ball_volume(metric: RadialMetric, r: float) -> float:
    """``int_{boundary_r}^{r} 4 pi phi(t)^2 dt``."""
    metric.check_domain(r)
    return _integrate(lambda t: FOUR_PI * float(metric.evaluate(t).phi) ** 2, metric.boundary_r, float(r), metric, "ball volume")


def _excess_integrand(metric):
    def f(t):
        w = metric.evaluate(t)
        phi, dphi = float(w.phi), float(w.dphi)
        root = math.sqrt(1.0 + phi * phi)
        if dphi > 0:
            factor = float(w.angular_defect) / (root * (root + dphi))
        else:
            factor = 1.0 - dphi / root
        return FOUR_PI * phi * phi * factor

    return f


def volume_excess(metric: RadialMetric, r_values) -> np.ndarray:
    """``V(r) - hyperbolic_reference(A(r))`` at each radius (sorted input)."""
    r_values = np.atleast_1d(metric.check_domain(r_values))
    if np.any(np.diff(r_values) < 0):
        raise ValidationError("radii must be sorted")
    f = _excess_integrand(metric)
    phi0 = float(metric.evaluate(metric.boundary_r).phi)
    start = -hyperbolic_reference(FOUR_PI * phi0 * phi0) if phi0 > 0 else 0.0
    out = np.empty_like(r_values)
    acc, prev = start, metric.boundary_r
    for i, r in enumerate(r_values):
        acc += _integrate(f, prev, float(r), metric, "volume excess", tol_scale=1.0e-12)
        out[i] = acc
        prev = float(r)
    return out


def radius_for_area(metric: RadialMetric, A: float) -> float:
    """Radius of the centered sphere of area ``A`` in the monotone end."""
    if not A > 0:
        raise ValidationError("area must be positive")
    target = math.sqrt(A / FOUR_PI)
    if metric.kind is MetricKind.EXACT_SADS:
        if target < metric.chart.s0:
            raise ValidationError("area below the boundary area")
        return float(metric.chart.r_of_s(target))
    if metric.kind is MetricKind.HYPERBOLIC:
        return max(math.asinh(target), metric.boundary_r)
    lo = max([metric.boundary_r] + [p for p in _glue_points(metric)])
    if float(metric.evaluate(lo).phi) > target:
        raise ValidationError("area not attained in the monotone end")
    hi = lo + 1.0
    while float(metric.evaluate(hi).phi) < target:
        hi += max(1.0, hi - lo)
        if hi > 700:
            raise ConvergenceError("area too large")
    return optimize.brentq(lambda t: float(metric.evaluate(t).phi) - target, lo, hi, xtol=1e-15, rtol=1e-15)


def profile_curve(metric: RadialMetric, r_grid, metric_id: str = "") -> ProfileCurve:
    r = np.asarray(r_grid, dtype=float)
    if r.ndim != 1 or len(r) == 0:
        raise ValidationError("r_grid must be a non-empty 1-D sequence")
    if np.any(np.diff(r) <= 0):
        raise ValidationError("r_grid must be strictly increasing")
    metric.check_domain(r)
    w = metric.evaluate(r)
    A = FOUR_PI * w.phi**2
    if np.any(np.diff(A) <= 0):
        raise ValidationError("area is not increasing along r_grid (grid crosses a neck)")
    f = lambda t: FOUR_PI * float(metric.evaluate(t).phi) ** 2
    V = np.empty_like(r)
    acc, prev = 0.0, metric.boundary_r
    for i, ri in enumerate(r):
        acc += _integrate(f, prev, float(ri), metric, "ball volume")
        V[i] = acc
        prev = float(ri)
    H = np.array([sphere_report(metric, float(ri)).H for ri in r])
    return ProfileCurve(r, np.asarray(A, dtype=float), V, H, metric_id)


def profile_by_area(metric: RadialMetric, areas, metric_id: str = "") -> ProfileCurve:
    return profile_curve(metric, [radius_for_area(metric, float(a)) for a in areas], metric_id)


def _renormalization_samples(metric: RadialMetric, window):
    lo = max(window[0], metric.boundary_r + 1.0, *(_glue_points(metric) or [0.0]))
    r = np.arange(lo, window[1] + 1e-9, RENORM_STEP)
    A = np.asarray(metric.area(r), dtype=float)
    y = volume_excess(metric, r) + reference_remainder(A)
    return r, A, y


def _const_fit(A, y, n_terms):
    basis = [fitting.constant(), fitting.power(-0.5), fitting.power(-1.0)][:n_terms]
    return fitting.fit_expansion(np.column_stack([A, y]), basis)


def renormalized_volume_estimate(metric: RadialMetric) -> tuple[float, float]:
    """``(V(M,g), error)`` by extrapolating ``V(A) - (A/2 - pi log A + pi(1 + log pi))``.

    The limit is the constant term of a fit against ``{1, A^-1/2, A^-1}`` over
    ``r`` in [8, 14]; the error is the spread against two reduced fits.
    """
    r, A, y = _renormalization_samples(metric, RENORM_WINDOW)
    if len(r) < 8:
        raise ConvergenceError("extrapolation window too short")
    steps = np.abs(np.diff(y))
    if steps[-1] > steps[0] and steps[0] > 1e-14:
        raise ConvergenceError("renormalized volume trend is not decaying")
    main = _const_fit(A, y, 3).coefficient("1")
    half = len(r) // 2
    alt_tail = _const_fit(A[half:], y[half:], 2).coefficient("1")
    alt_short = _const_fit(A[: -2], y[: -2], 3).coefficient("1")
    err = max(abs(main - alt_tail), abs(main - alt_short))
    return float(main), float(err)


def renormalized_volume(metric: RadialMetric) -> float:
    value, err = renormalized_volume_estimate(metric)
    if not err < RENORM_TOL:
        raise ConvergenceError(f"renormalized volume extrapolation error {err:.3g} exceeds {RENORM_TOL}")
    return value


def isoballs_samples(metric: RadialMetric, window=ISOBALLS_WINDOW, renorm: float | None = None):
    """``(A, V(A) - A/2 + pi log A - pi(1 + log pi) - V(M,g))`` on ``window``."""
    if renorm is None:
        renorm = renormalized_volume(metric)
    r, A, y = _renormalization_samples(metric, window)
    return A, y - renorm


def isoballs_fit(metric: RadialMetric, window=ISOBALLS_WINDOW) -> ExpansionFit:
    """Fit the centered-ball volume remainder against ``{A^-1/2, A^-1}``.

    For a metric asymptotic to SAdS of mass ``m`` the ``A^-1/2`` coefficient
    should approach ``-8 pi^(3/2) m``.
    """
    A, y = isoballs_samples(metric, window)
    return fitting.fit_expansion(np.column_stack([A, y]), [fitting.power(-0.5), fitting.power(-1.0)])


def isoballs_constant_fit(metric: RadialMetric, window=RENORM_WINDOW) -> ExpansionFit:
    """Fit ``V(A) - A/2 + pi log A`` against ``{1, A^-1/2, A^-1}``.

    The constant term is ``pi (1 + log pi) + V(M,g)``; on hyperbolic space it
    is the bare isoperimetric constant.
    """
    r, A, y = _renormalization_samples(metric, window)
    return _const_fit(A, y + ISO_CONSTANT, 3)


def drift_quantity(metric: RadialMetric) -> float:
    """``V(M,g) + area(dM)/2``."""
    return renormalized_volume(metric) + 0.5 * metric.boundary_area


def profile_summary(metric: RadialMetric) -> ProfileSummary:
    v = renormalized_volume(metric)
    fit = isoballs_fit(metric) if metric.kind is not MetricKind.SPLINE_GLUED else None
    return ProfileSummary(v, v + 0.5 * metric.boundary_area, fit)


def foliation_mass_curve(metric: RadialMetric, r_grid, max_step: float = 0.5):
    """Rows ``(A, F, F')`` with ``F`` the Hawking mass of ``S_r`` and ``F' = dF/dA``."""
    r = np.asarray(r_grid, dtype=float)
    if r.ndim != 1 or len(r) < 3:
        raise ValidationError("need at least 3 radii for central differences")
    if np.any(np.diff(r) <= 0):
        raise ValidationError("r_grid must be strictly increasing")
    if np.max(np.diff(r)) > max_step:
        raise ValidationError(f"grid spacing exceeds {max_step} in r; differences would be unstable")
    reports = [sphere_report(metric, float(x)) for x in r]
    A = np.array([rep.area for rep in reports])
    F = np.array([rep.hawking for rep in reports])
    dF = np.gradient(F, A, edge_order=2)
    return [(float(a), float(f), float(d)) for a, f, d in zip(A, F, dF)]


def fornberg_weights(z: float, x: np.ndarray, order: int) -> np.ndarray:
    """Finite-difference weights at ``z`` for derivatives 0..order on nodes ``x``."""
    n = len(x)
    c = np.zeros((n, order + 1))
    c1, c4 = 1.0, x[0] - z
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, order)
        c2, c5, c4 = 1.0, c4, x[i] - z
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c


def derivative_laws(profile: ProfileCurve) -> dict:
    """Finite-difference diagnostics along a centered-ball profile.

    ``second_law`` rows are ``(A, 2 V'' V'^-3 A^2)``, ``mono23`` rows are
    ``(A, V'^-2 - 23 pi / A)`` and ``dVdA`` rows are ``(A, V')``; derivatives are five-point stencils in
    ``x = log A`` applied to ``V - A/2``.  The two samples at each end are
    dropped.
    """
    A, V = np.asarray(profile.A, dtype=float), np.asarray(profile.V, dtype=float)
    if len(A) < 5:
        raise ValidationError("derivative laws need at least 5 samples")
    x = np.log(A)
    W = V - A / 2.0
    second, mono, slope = [], [], []
    for i in range(2, len(A) - 2):
        wts = fornberg_weights(x[i], x[i - 2 : i + 3], 2)
        w1 = wts[:, 1] @ W[i - 2 : i + 3]
        w2 = wts[:, 2] @ W[i - 2 : i + 3]
        vx = w1 + A[i] / 2.0
        # V_xx - V_x = W_xx - W_x
        second.append((float(A[i]), float(2.0 * (w2 - w1) * A[i] ** 3 / vx**3)))
        mono.append((float(A[i]), float((A[i] / vx) ** 2 - 23.0 * math.pi / A[i])))
        slope.append((float(A[i]), float(vx / A[i])))
    return {"second_law": second, "mono23": mono, "dVdA": slope}
