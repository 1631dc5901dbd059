"""Numerical laboratory for rotationally symmetric asymptotically hyperbolic 3-manifolds.

Metrics are warped products ``dr^2 + phi(r)^2 g_S2``: hyperbolic space, exact
Schwarzschild-anti-deSitter, decaying perturbations of it, and spline gluings.
"""

from .conformal import (
    MobiusMap,
    MobiusParams,
    SphereField,
    SphereGrid,
    ball_model_r,
    disk_plane_residual,
    make_grid,
    mobius_conformal_factor,
    mobius_pullback,
    random_field,
    s_functional,
)
from .counterexample import SHIPPED_SPEC, CounterexampleReport, control_demo, counterexample_demo
from .errors import AliasingError, ConvergenceError, RankDeficiencyError, SadsLabError, ValidationError
from .fitting import BasisFunction, ExpansionFit, decay_rate, fit_expansion
from .metrics import (
    CurvatureSample,
    GluingSpec,
    MetricKind,
    RadialMetric,
    curvature,
    make_glued,
    make_hyperbolic,
    make_perturbed,
    make_sads,
)
from .profile import (
    ProfileCurve,
    ProfileSummary,
    ball_volume,
    derivative_laws,
    drift_quantity,
    foliation_mass_curve,
    hyperbolic_reference,
    isoballs_fit,
    profile_curve,
    renormalized_volume,
)
from .specfile import load_metric, metric_from_spec
from .spheres import (
    RescalingReport,
    SphereReport,
    SpectrumReport,
    hawking_mass,
    rescaling_report,
    sphere_report,
    stability_spectrum,
)

__version__ = "0.1.0"
