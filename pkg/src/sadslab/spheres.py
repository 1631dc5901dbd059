"""Per-sphere geometry of centered coordinate spheres ``S_r``.

Centered spheres in a rotationally symmetric metric are umbilic, so the
traceless second fundamental form and the tangential gradient of ``r``
vanish.  The general-surface identities then reduce to closed expressions in
the warp data, which is what every function below evaluates.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ValidationError
from .metrics import RadialMetric, curvature

FOUR_PI = 4.0 * math.pi
SIXTEEN_PI = 16.0 * math.pi


@dataclass(frozen=True)
class SphereReport:
    r: float
    s: float
    area: float
    H: float
    K: float
    hawking: float
    cy_slack: float
    gauss_residual: float
    deltar_residual: float
    H_minus_2: float

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SpectrumReport:
    r: float
    eigenvalues: tuple[tuple[int, float], ...]

    def eigenvalue(self, ell: int) -> float:
        return dict(self.eigenvalues)[ell]


@dataclass(frozen=True)
class RescalingReport:
    r: float
    r_hat: float
    w: float
    psi: float
    xi: float
    delta_radius: float


def hawking_mass(area: float, H: float) -> float:
    """Hawking mass ``sqrt(A) / (16 pi)^(3/2) * (16 pi - (H^2 - 4) A)``."""
    if not area > 0:
        raise ValidationError(f"area must be positive, got {area!r}")
    return math.sqrt(area) / SIXTEEN_PI**1.5 * (SIXTEEN_PI - (H * H - 4.0) * area)


def _mean_curvature_excess(phi, dphi, angular_defect):
    # H - 2 = 2 (phi' - phi) / phi, with phi' - phi = (1 - angular_defect) / (phi' + phi)
    if dphi + phi > 0.5 * phi:
        return 2.0 * (1.0 - angular_defect) / (phi * (dphi + phi))
    return 2.0 * dphi / phi - 2.0


def sphere_report(metric: RadialMetric, r: float) -> SphereReport:
    """All pointwise quantities of the centered sphere ``S_r``.

    Residual conventions::

        cy_slack        = 16 pi - (H^2 - 4) A - (2/3) A (R + 6)
        gauss_residual  = 4K - (H^2 - 4) - 64 m e^{-3r}
        deltar_residual = 4 e^{-2r} - (H - 2)

    The Hawking bracket ``16 pi - (H^2 - 4) A`` equals ``16 pi (1 + phi^2 - phi'^2)``
    on a centered sphere and is evaluated in that form.
    """
    w = metric.evaluate(r)
    phi, dphi = float(w.phi), float(w.dphi)
    if phi <= 0:
        raise ValidationError(f"degenerate sphere at r = {r}")
    defect = float(w.angular_defect)
    area = FOUR_PI * phi * phi
    h_excess = _mean_curvature_excess(phi, dphi, defect)
    bracket = SIXTEEN_PI * defect
    curv = curvature(metric, r)
    hawking = math.sqrt(area) / SIXTEEN_PI**1.5 * bracket
    return SphereReport(
        r=float(r),
        s=phi,
        area=area,
        H=2.0 + h_excess,
        K=1.0 / phi**2,
        hawking=hawking,
        cy_slack=bracket - (2.0 / 3.0) * area * curv.scalar_R_plus_6,
        gauss_residual=4.0 * defect / phi**2 - 64.0 * metric.mass * math.exp(-3.0 * r),
        deltar_residual=4.0 * math.exp(-2.0 * r) - h_excess,
        H_minus_2=h_excess,
    )


def stability_spectrum(metric: RadialMetric, r: float, l_max: int) -> SpectrumReport:
    """Eigenvalues of ``-Delta - (Ric(nu,nu) + |h|^2)`` on ``S_r``.

    On a centered sphere ``|h|^2 = H^2/2`` and the eigenfunctions are the
    spherical harmonics, so ``lambda_l = l(l+1)/phi^2 - Ric(nu,nu) - H^2/2``.
    """
    if isinstance(l_max, bool) or not isinstance(l_max, (int, np.integer)) or l_max < 1:
        raise ValidationError(f"l_max must be an integer >= 1, got {l_max!r}")
    w = metric.evaluate(r)
    phi = float(w.phi)
    if phi <= 0:
        raise ValidationError(f"degenerate sphere at r = {r}")
    # Ric + 2 = -2 (phi'' - phi)/phi and H^2/2 - 2 = 2 (1 - angular_defect)/phi^2
    shift = 2.0 * float(w.radial_defect) / phi
    zero_mode = -2.0 * (1.0 - float(w.angular_defect)) / phi**2
    eig = tuple((ell, ell * (ell + 1) / phi**2 + zero_mode + shift) for ell in range(int(l_max) + 1))
    return SpectrumReport(float(r), eig)


def xi_from_radius(r_values, r_hat: float):
    """``(r - r_hat) - log(1 - e^{-2 r_hat}) + log(1 - e^{-2r}) + log coth(r/2)``.

    ``r_values`` may be an array of the radial coordinate sampled over a surface.
    """
    r_values = np.asarray(r_values, dtype=float)
    return (
        (r_values - r_hat)
        - math.log(-math.expm1(-2.0 * r_hat))
        + np.log(-np.expm1(-2.0 * r_values))
        - np.log(np.tanh(r_values / 2.0))
    )


def rescaling_report(metric: RadialMetric, r: float) -> RescalingReport:
    """Homothetic and conformal rescaling data of a centered coordinate sphere."""
    if not r > 0:
        raise ValidationError("rescaling needs r > 0")
    metric.check_domain(r)
    # the background area of S_r is 4 pi sinh(r)^2, so its area radius is r itself
    r_hat = float(r)
    return RescalingReport(
        r=float(r),
        r_hat=r_hat,
        w=r - r_hat,
        psi=1.0 + math.cosh(r),
        xi=float(xi_from_radius(r, r_hat)),
        delta_radius=math.tanh(r / 2.0),
    )
