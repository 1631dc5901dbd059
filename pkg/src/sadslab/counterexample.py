"""Shipped counterexample: SAdS with a deflated core and scalar curvature below -6.

Inside the glue interval the warp is pulled far below the SAdS profile.  This
removes enclosed volume without changing the exterior, so the renormalized
volume drops until ``V(M,g) + area(dM)/2`` turns negative.  Large centered
balls then lose to far-away competitors of the same area.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .metrics import GluingSpec, MetricKind, RadialMetric, curvature, make_glued, make_sads
from .profile import RENORM_STEP, reference_remainder, renormalized_volume, volume_excess

SHIPPED_SPEC = GluingSpec(
    exterior_mass=1.0,
    glue_interval=(2.0, 3.5),
    interior_profile=((2.5, 5.453288), (2.75, 6.625588), (3.0, 9.019065)),
)

VERDICT_BEATEN = "centered spheres are beaten by far competitors for all A above threshold A*"
VERDICT_SURVIVE = "centered spheres survive the (*) test"

SCAN_TOP = 14.0
CURVATURE_SAMPLES = 2001


@dataclass(frozen=True)
class CounterexampleReport:
    metric_spec: dict
    min_scalar_R: float
    r_at_min: float
    renorm_volume: float
    boundary_area: float
    drift_star: float
    threshold_area: float | None
    verdict: str

    def as_dict(self) -> dict:
        return {
            "metric": self.metric_spec,
            "min_scalar_R": self.min_scalar_R,
            "r_at_min": self.r_at_min,
            "renorm_volume": self.renorm_volume,
            "boundary_area": self.boundary_area,
            "drift_star": self.drift_star,
            "threshold_area": self.threshold_area,
            "verdict": self.verdict,
        }


def _scan_start(metric: RadialMetric) -> float:
    if metric.kind is MetricKind.SPLINE_GLUED:
        return float(metric.warp_model.r_b)
    return metric.boundary_r + 1.0


def threshold_area(metric: RadialMetric, margin: float) -> float | None:
    """Smallest sampled ``A`` from which on ``V(A) < A/2 - pi log A + pi(1 + log pi) - margin``.

    Sampling starts at the outer glue point (one unit past the boundary for
    unglued metrics) and runs to ``r = 14``.  Returns ``None`` when the
    inequality fails at the outermost sample.
    """
    r = np.arange(_scan_start(metric), SCAN_TOP + 1e-9, RENORM_STEP)
    A = np.asarray(metric.area(r), dtype=float)
    # V(A) - reference(A) = excess over the hyperbolic ball + closed-form remainder
    gap = volume_excess(metric, r) + reference_remainder(A)
    beaten = gap < -margin
    if not beaten[-1]:
        return None
    i = len(beaten) - 1
    while i > 0 and beaten[i - 1]:
        i -= 1
    return float(A[i])


def analyze_metric(metric: RadialMetric) -> CounterexampleReport:
    lo = metric.boundary_r
    hi = _scan_start(metric) + 1.0
    grid = np.linspace(lo, hi, CURVATURE_SAMPLES)
    # a smooth pole (hyperbolic space with boundary_r = 0) has phi = 0 there
    grid = grid[np.asarray(metric.phi(grid)) > 0]
    R = np.array([curvature(metric, float(x)).scalar_R for x in grid])
    k = int(np.argmin(R))
    renorm = renormalized_volume(metric)
    margin = 0.5 * metric.boundary_area
    drift = renorm + margin
    a_star = threshold_area(metric, margin) if drift < 0 else None
    verdict = VERDICT_BEATEN if drift < 0 and a_star is not None else VERDICT_SURVIVE
    return CounterexampleReport(
        metric_spec=metric.to_spec(),
        min_scalar_R=float(R[k]),
        r_at_min=float(grid[k]),
        renorm_volume=renorm,
        boundary_area=metric.boundary_area,
        drift_star=drift,
        threshold_area=a_star,
        verdict=verdict,
    )


def counterexample_demo(spec: GluingSpec = SHIPPED_SPEC) -> CounterexampleReport:
    return analyze_metric(make_glued(spec))


def control_demo(mass: float = 1.0) -> CounterexampleReport:
    """Same diagnostics on exact SAdS, where (*) is positive."""
    return analyze_metric(make_sads(mass))
