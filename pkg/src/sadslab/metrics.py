"""Rotationally symmetric asymptotically hyperbolic metrics.

Every metric here has the warped-product form ``dr^2 + phi(r)^2 g_S2`` on
``r >= boundary_r``.  Besides ``phi`` and its first two derivatives each warp
evaluator returns two *defects* that vanish identically on hyperbolic space::

    radial_defect  = phi'' - phi
    angular_defect = 1 + phi^2 - phi'^2

All curvature quantities that tend to a hyperbolic constant (``R + 6``,
``Ric(nu, nu) + 2``, ``H - 2``, the Hawking-mass bracket) are assembled from
these defects, so they stay accurate long after direct subtraction would have
cancelled to zero in double precision.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy import integrate, interpolate

from .errors import ConvergenceError, ValidationError

__all__ = [
    "MetricKind",
    "WarpValues",
    "CurvatureSample",
    "GluingSpec",
    "RadialMetric",
    "SAdSChart",
    "make_hyperbolic",
    "make_sads",
    "make_perturbed",
    "make_glued",
    "curvature",
]

# Chart table covers s in [2m, S_MAX]; beyond it the tail integral is a series.
S_MAX = 1.0e6
TAIL_TOL = 1.0e-12
C2_TOL = 1.0e-8
_DOMAIN_SLACK = 1.0e-12


class MetricKind(str, enum.Enum):
    HYPERBOLIC = "hyperbolic"
    EXACT_SADS = "sads"
    PERTURBED_SADS = "perturbed"
    SPLINE_GLUED = "glued"


class WarpValues(NamedTuple):
    phi: np.ndarray
    dphi: np.ndarray
    ddphi: np.ndarray
    radial_defect: np.ndarray
    angular_defect: np.ndarray


@dataclass(frozen=True)
class CurvatureSample:
    """Curvature scalars at the centered coordinate sphere ``S_r``.

    ``scalar_R_plus_6`` and ``ric_nn_plus_2`` carry the same information as
    ``scalar_R`` and ``ric_nn`` without the cancellation against the
    hyperbolic constants.
    """

    r: float
    scalar_R: float
    ric_nn: float
    sphere_K: float
    scalar_R_plus_6: float
    ric_nn_plus_2: float


def _quad(func, a, b, what):
    value, err = integrate.quad(func, a, b, epsabs=1.0e-15, epsrel=1.0e-13, limit=200)
    if not np.isfinite(value) or err > TAIL_TOL * max(1.0, abs(value)):
        raise ConvergenceError(f"quadrature for {what} on [{a}, {b}] did not converge (err={err:.3g})")
    return value


class SAdSChart:
    """Normalized geodesic chart for Schwarzschild-anti-deSitter of mass ``m``.

    The static metric is ``ds^2 / V(s) + s^2 g_S2`` with
    ``V(s) = 1 + s^2 - 2m/s`` on ``s >= 2m``.  The geodesic coordinate is pinned
    by ``r(s) = arcsinh(s) - T(s)`` with the tail integral
    ``T(s) = int_s^inf (V^-1/2 - (1+t^2)^-1/2) dt``, so ``r - arcsinh(s) -> 0``.

    ``T`` is tabulated on arcsinh-spaced nodes by cumulative adaptive
    quadrature; the inverse ``s(r)`` is a quintic Hermite interpolant of
    ``log s`` built from exact first and second derivatives.
    """

    def __init__(self, mass: float, node_step: float = 0.01):
        if not mass > 0 or not math.isfinite(mass):
            raise ValidationError(f"mass must be positive, got {mass!r}")
        if 2.0 * mass >= S_MAX / 10:
            raise ValidationError(f"mass {mass} too large for the chart table")
        self.mass = float(mass)
        self.s0 = 2.0 * self.mass

        u = np.arange(math.asinh(self.s0), math.asinh(S_MAX), node_step)
        u = np.append(u, math.asinh(S_MAX))
        s_nodes = np.sinh(u)
        s_nodes[0] = self.s0
        s_nodes[-1] = S_MAX
        tails = np.empty_like(s_nodes)
        tails[-1] = self._series_tail(S_MAX)
        for i in range(len(s_nodes) - 2, -1, -1):
            tails[i] = tails[i + 1] + _quad(self._tail_integrand, s_nodes[i], s_nodes[i + 1], "chart tail")
        self.s_nodes = s_nodes
        self.tail_nodes = tails
        self.r_nodes = np.arcsinh(s_nodes) - tails
        if np.any(np.diff(self.r_nodes) <= 0):
            raise ConvergenceError("chart table is not monotone")

        v = self.V(s_nodes)
        y = np.log(s_nodes)
        dy = np.sqrt(v) / s_nodes
        ddy = self.dV(s_nodes) / (2.0 * s_nodes) - v / s_nodes**2
        self._log_s = interpolate.BPoly.from_derivatives(self.r_nodes, np.column_stack([y, dy, ddy]))
        self.r0 = float(self.r_nodes[0])
        self.r_top = float(self.r_nodes[-1])

    # closed forms in the static coordinate
    def V(self, s):
        s = np.asarray(s, dtype=float)
        return 1.0 + s * s - 2.0 * self.mass / s

    def dV(self, s):
        s = np.asarray(s, dtype=float)
        return 2.0 * s + 2.0 * self.mass / (s * s)

    def _tail_integrand(self, t):
        sv = math.sqrt(1.0 + t * t - 2.0 * self.mass / t)
        sh = math.sqrt(1.0 + t * t)
        return (2.0 * self.mass / t) / (sv * sh * (sh + sv))

    def _series_tail(self, s):
        m = self.mass
        return m / (3.0 * s**3) - 0.3 * m / s**5 + 0.25 * m * m / s**6

    def tail(self, s):
        """``T(s)``, evaluated without cancellation."""
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        if np.any(s_arr < self.s0 * (1 - 1e-14)):
            raise ValidationError("s below the boundary sphere s0 = 2m")
        out = np.empty_like(s_arr)
        for k, sk in enumerate(s_arr):
            if sk >= S_MAX:
                out[k] = self._series_tail(sk)
                continue
            i = int(np.searchsorted(self.s_nodes, sk, side="right"))
            i = min(max(i, 1), len(self.s_nodes) - 1)
            out[k] = self.tail_nodes[i] + _quad(self._tail_integrand, sk, self.s_nodes[i], "chart tail")
        return out if np.ndim(s) else float(out[0])

    def r_of_s(self, s):
        return np.arcsinh(s) - self.tail(s)

    def s_of_r(self, r):
        r_arr = np.asarray(r, dtype=float)
        if np.any(r_arr < self.r0 - _DOMAIN_SLACK):
            raise ValidationError(f"r below boundary r0 = {self.r0}")
        rc = np.clip(r_arr, self.r0, self.r_top)
        s = np.exp(self._log_s(rc))
        far = r_arr > self.r_top
        if np.any(far):
            sf = np.sinh(r_arr[far])
            for _ in range(4):
                sf = np.sinh(r_arr[far] + self._series_tail(sf))
            s = np.where(far, 0.0, s)
            s[far] = sf
        return s if np.ndim(r) else float(s)

    def phi_sq_minus_sinh_sq(self, r):
        """``s(r)^2 - sinh(r)^2`` from the tail integral (no cancellation)."""
        s = np.atleast_1d(self.s_of_r(r))
        t = np.atleast_1d(self.tail(s))
        diff = -2.0 * s * np.sinh(t / 2.0) ** 2 + np.sqrt(1.0 + s * s) * np.sinh(t)
        sinh_r = s - diff
        out = diff * (s + sinh_r)
        return out if np.ndim(r) else float(out[0])


class _HyperbolicWarp:
    def evaluate(self, r):
        r = np.asarray(r, dtype=float)
        sh, ch = np.sinh(r), np.cosh(r)
        zero = np.zeros_like(r)
        return WarpValues(sh, ch, sh, zero, zero)


class _SAdSWarp:
    def __init__(self, chart: SAdSChart):
        self.chart = chart

    def evaluate(self, r):
        s = np.asarray(self.chart.s_of_r(r), dtype=float)
        m = self.chart.mass
        return WarpValues(
            s,
            np.sqrt(self.chart.V(s)),
            s + m / (s * s),
            m / (s * s),
            2.0 * m / s,
        )


class _PerturbedWarp:
    """``phi = phi_sads * sqrt(1 + q)`` with ``q = sum a_k exp(-c_k r)``."""

    def __init__(self, base: _SAdSWarp, terms):
        self.base = base
        self.amps = np.array([a for a, _ in terms], dtype=float)
        self.rates = np.array([c for _, c in terms], dtype=float)

    def q(self, r):
        r = np.asarray(r, dtype=float)[..., None]
        e = self.amps * np.exp(-self.rates * r)
        return e.sum(-1), (-self.rates * e).sum(-1), (self.rates**2 * e).sum(-1)

    def evaluate(self, r):
        b = self.base.evaluate(r)
        q, dq, ddq = self.q(r)
        u = np.sqrt(1.0 + q)
        du = dq / (2.0 * u)
        ddu = ddq / (2.0 * u) - dq * dq / (4.0 * u**3)
        phi = b.phi * u
        dphi = b.dphi * u + b.phi * du
        ddphi = b.ddphi * u + 2.0 * b.dphi * du + b.phi * ddu
        radial = b.radial_defect * u + 2.0 * b.dphi * du + b.phi * ddu
        angular = u * u * b.angular_defect - q - 2.0 * b.phi * b.dphi * u * du - (b.phi * du) ** 2
        return WarpValues(phi, dphi, ddphi, radial, angular)


class _GluedWarp:
    """SAdS outside ``[r_a, r_b]``; a quintic spline matched to C^2 inside."""

    def __init__(self, base: _SAdSWarp, r_a: float, r_b: float, spline):
        self.base = base
        self.r_a, self.r_b = r_a, r_b
        self.spline = spline
        self.d1 = spline.derivative(1)
        self.d2 = spline.derivative(2)

    def evaluate(self, r):
        r = np.asarray(r, dtype=float)
        b = self.base.evaluate(r)
        inside = (r > self.r_a) & (r < self.r_b)
        if not np.any(inside):
            return b
        phi = np.where(inside, self.spline(r), b.phi)
        dphi = np.where(inside, self.d1(r), b.dphi)
        ddphi = np.where(inside, self.d2(r), b.ddphi)
        radial = np.where(inside, ddphi - phi, b.radial_defect)
        angular = np.where(inside, 1.0 + phi * phi - dphi * dphi, b.angular_defect)
        return WarpValues(phi, dphi, ddphi, radial, angular)


@dataclass(frozen=True)
class GluingSpec:
    """Compactly supported modification of SAdS on ``glue_interval``.

    ``interior_profile`` lists ``(r, phi)`` knots strictly inside the interval;
    the endpoint values and first two derivatives come from SAdS itself.
    """

    exterior_mass: float
    glue_interval: tuple[float, float]
    interior_profile: tuple[tuple[float, float], ...]
    boundary_r: float | None = None

    def to_dict(self) -> dict:
        return {
            "exterior_mass": self.exterior_mass,
            "glue_interval": list(self.glue_interval),
            "interior_profile": [list(k) for k in self.interior_profile],
            "boundary_r": self.boundary_r,
        }


@dataclass(frozen=True, eq=False)
class RadialMetric:
    """``dr^2 + phi(r)^2 g_S2`` on ``r >= boundary_r``; immutable."""

    kind: MetricKind
    mass: float
    boundary_r: float
    warp_model: object = field(repr=False)
    chart: SAdSChart | None = field(default=None, repr=False)
    payload: dict = field(default_factory=dict, repr=False)

    def check_domain(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if np.any(~np.isfinite(r)) or np.any(r < self.boundary_r - _DOMAIN_SLACK):
            raise ValidationError(f"radius below boundary r = {self.boundary_r}")
        return r

    def evaluate(self, r) -> WarpValues:
        return self.warp_model.evaluate(self.check_domain(r))

    def warp(self, r):
        """``(phi, phi', phi'')`` at ``r``."""
        w = self.evaluate(r)
        return w.phi, w.dphi, w.ddphi

    def phi(self, r):
        return self.evaluate(r).phi

    def area(self, r):
        return 4.0 * np.pi * self.evaluate(r).phi ** 2

    @property
    def boundary_area(self) -> float:
        return float(4.0 * np.pi * self.evaluate(self.boundary_r).phi ** 2)

    def to_spec(self) -> dict:
        """Serializable description accepted by :func:`sadslab.specfile.metric_from_spec`."""
        spec = {"kind": self.kind.value, "mass": self.mass, "boundary": self.boundary_r}
        spec.update(self.payload)
        return spec


def make_hyperbolic(boundary_r: float = 0.0) -> RadialMetric:
    if boundary_r < 0:
        raise ValidationError("boundary_r must be non-negative")
    return RadialMetric(MetricKind.HYPERBOLIC, 0.0, float(boundary_r), _HyperbolicWarp())


_CHART_CACHE: dict[float, SAdSChart] = {}


def _chart(mass: float) -> SAdSChart:
    # charts are immutable; building one costs ~1500 short quadratures
    key = float(mass)
    if key not in _CHART_CACHE:
        _CHART_CACHE[key] = SAdSChart(key)
    return _CHART_CACHE[key]


def make_sads(m: float) -> RadialMetric:
    """Exact Schwarzschild-anti-deSitter of mass ``m`` with boundary ``s0 = 2m``."""
    if not (isinstance(m, (int, float)) and m > 0 and math.isfinite(m)):
        raise ValidationError(f"mass must be positive, got {m!r}")
    chart = _chart(m)
    return RadialMetric(MetricKind.EXACT_SADS, float(m), chart.r0, _SAdSWarp(chart), chart)


def make_perturbed(m: float, terms: Sequence[tuple[float, float]]) -> RadialMetric:
    """SAdS with ``phi^2`` scaled by ``1 + sum a exp(-c r)``.

    The metric is compliant (remainder ``O(e^{-5r})`` with two derivatives)
    when every rate ``c >= 5``.
    """
    base = make_sads(m)
    terms = [(float(a), float(c)) for a, c in terms]
    if not terms:
        raise ValidationError("perturbation needs at least one (amplitude, rate) term")
    if any(c <= 0 for _, c in terms):
        raise ValidationError("perturbation rates must be positive")
    warp = _PerturbedWarp(base.warp_model, terms)
    probe = np.linspace(base.boundary_r, base.boundary_r + 30.0, 3001)
    if np.min(1.0 + warp.q(probe)[0]) <= 0:
        raise ValidationError("perturbation makes phi^2 non-positive")
    return RadialMetric(
        MetricKind.PERTURBED_SADS,
        float(m),
        base.boundary_r,
        warp,
        base.chart,
        {"perturbation": [[a, c] for a, c in terms]},
    )


def perturbation_is_compliant(metric: RadialMetric) -> bool:
    if metric.kind is not MetricKind.PERTURBED_SADS:
        return metric.kind is not MetricKind.SPLINE_GLUED
    return bool(np.all(metric.warp_model.rates >= 5.0))


def make_glued(spec: GluingSpec) -> RadialMetric:
    r_a, r_b = map(float, spec.glue_interval)
    if not r_b > r_a:
        raise ValidationError("glue interval must satisfy r_a < r_b")
    base = make_sads(spec.exterior_mass)
    boundary = base.boundary_r if spec.boundary_r is None else float(spec.boundary_r)
    if boundary < base.boundary_r - _DOMAIN_SLACK or boundary >= r_a:
        raise ValidationError("boundary_r must lie in [r(2m), r_a)")
    knots = sorted((float(r), float(p)) for r, p in spec.interior_profile)
    if any(not (r_a < r < r_b) for r, _ in knots):
        raise ValidationError("interior knots must lie strictly inside the glue interval")
    if any(p <= 0 for _, p in knots):
        raise ValidationError("interior knots must have phi > 0")
    ends = base.evaluate(np.array([r_a, r_b]))
    x = np.array([r_a] + [r for r, _ in knots] + [r_b])
    y = np.array([ends.phi[0]] + [p for _, p in knots] + [ends.phi[1]])
    if np.any(np.diff(x) <= 0):
        raise ValidationError("interior knots must be distinct")
    bc = (
        [(1, float(ends.dphi[0])), (2, float(ends.ddphi[0]))],
        [(1, float(ends.dphi[1])), (2, float(ends.ddphi[1]))],
    )
    spline = interpolate.make_interp_spline(x, y, k=5, bc_type=bc)

    for j, (d, label) in enumerate([(0, "phi"), (1, "phi'"), (2, "phi''")]):
        got = spline(x[[0, -1]], nu=d)
        want = np.array([ends.phi, ends.dphi, ends.ddphi][j])
        if np.max(np.abs(got - want) / np.maximum(1.0, np.abs(want))) > C2_TOL:
            raise ValidationError(f"C2 mismatch in {label} at the glue points")
    probe = np.linspace(r_a, r_b, 4001)
    if np.min(spline(probe)) <= 0:
        raise ValidationError("spline gives phi <= 0 inside the glue interval")

    warp = _GluedWarp(base.warp_model, r_a, r_b, spline)
    payload = {"gluing": {"glue_interval": [r_a, r_b], "interior_profile": [list(k) for k in knots]}}
    return RadialMetric(MetricKind.SPLINE_GLUED, float(spec.exterior_mass), boundary, warp, base.chart, payload)


def curvature(metric: RadialMetric, r: float) -> CurvatureSample:
    """Curvature of the warped product at ``S_r``.

    ``Ric(nu,nu) = -2 phi''/phi``, ``K = 1/phi^2`` and
    ``R = -4 phi''/phi + 2 (1 - phi'^2)/phi^2``.
    """
    w = metric.evaluate(r)
    phi = float(w.phi)
    if phi <= 0:
        raise ValidationError(f"phi vanishes at r = {r}")
    ric_plus_2 = -2.0 * float(w.radial_defect) / phi
    r_plus_6 = -4.0 * float(w.radial_defect) / phi + 2.0 * float(w.angular_defect) / phi**2
    return CurvatureSample(
        r=float(r),
        scalar_R=-6.0 + r_plus_6,
        ric_nn=-2.0 + ric_plus_2,
        sphere_K=1.0 / phi**2,
        scalar_R_plus_6=r_plus_6,
        ric_nn_plus_2=ric_plus_2,
    )
