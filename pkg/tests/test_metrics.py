import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sadslab import (
    ConvergenceError,
    GluingSpec,
    MetricKind,
    ValidationError,
    curvature,
    fitting,
    make_glued,
    make_hyperbolic,
    make_perturbed,
    make_sads,
    sphere_report,
)
from sadslab.counterexample import SHIPPED_SPEC
from sadslab.metrics import perturbation_is_compliant

# frozen oracles
R0_MASS1 = 1.4067464956104339  # r(s = 2) for m = 1


def test_hyperbolic_closed_form(hyperbolic):
    assert float(hyperbolic.phi(1.0)) == pytest.approx(1.1752011936438014, abs=1e-15)
    assert hyperbolic.mass == 0 and hyperbolic.boundary_r == 0
    phi, dphi, ddphi = hyperbolic.warp(2.0)
    assert (phi, dphi, ddphi) == pytest.approx((math.sinh(2.0), math.cosh(2.0), math.sinh(2.0)), rel=1e-15)
    r = np.linspace(0.5, 20, 40)
    assert np.all(hyperbolic.phi(r) / np.sinh(r) == 1.0)


@pytest.mark.parametrize("r", [1.0, 5.0, 10.0])
def test_hyperbolic_curvature(hyperbolic, r):
    c = curvature(hyperbolic, r)
    assert c.scalar_R == -6.0
    assert c.ric_nn == -2.0
    assert c.sphere_K == pytest.approx(1.0 / math.sinh(r) ** 2, rel=1e-15)


def test_sads_boundary_is_h_equals_two(sads1):
    assert sads1.boundary_r == pytest.approx(R0_MASS1, abs=1e-12)
    assert float(sads1.phi(sads1.boundary_r)) == pytest.approx(2.0, abs=1e-12)
    assert sphere_report(sads1, sads1.boundary_r).H == pytest.approx(2.0, abs=1e-12)


def test_sads_two_thirds_coefficient(sads1):
    r = np.linspace(6.0, 12.0, 25)
    y = sads1.chart.phi_sq_minus_sinh_sq(r)
    basis = [fitting.BasisFunction("1/sinh", lambda x: 1.0 / np.sinh(x))]
    c = fitting.fit_expansion(np.column_stack([r, y]), basis).coefficients[0]
    assert c == pytest.approx(2.0 / 3.0, rel=0.02)
    assert c == pytest.approx(0.66666259, abs=1e-6)


def test_sads_small_mass_limit():
    metric = make_sads(1e-6)
    for r in (0.5, 1.0, 3.0):
        assert float(metric.phi(r)) == pytest.approx(math.sinh(r), rel=1e-5)
    s = 5.0
    assert float(metric.chart.r_of_s(s)) == pytest.approx(math.asinh(s), abs=1e-6)


@pytest.mark.parametrize("m", [0.5, 1.0, 2.0])
def test_asymptotic_ratio(m):
    metric = make_sads(m)
    assert abs(float(metric.phi(12.0)) / math.sinh(12.0) - 1) < 1e-3


def test_built_ins_asymptotic_ratio(hyperbolic):
    for metric in (hyperbolic, make_perturbed(1.0, [(0.2, 5.0)]), make_glued(SHIPPED_SPEC)):
        assert abs(float(metric.phi(12.0)) / math.sinh(12.0) - 1) < 1e-3


@pytest.mark.parametrize("r", [4.0, 6.0, 8.0])
def test_sads_scalar_curvature_exact(sads1, r):
    assert abs(curvature(sads1, r).scalar_R + 6.0) < 1e-6


def test_sads_ricci_expansion(sads1):
    r = 8.0
    c = curvature(sads1, r)
    assert c.ric_nn_plus_2 / (-16.0 * math.exp(-3 * r)) == pytest.approx(1.0, rel=0.1)
    # with the precise field the agreement is much better than 10%
    assert c.ric_nn_plus_2 / (-16.0 * math.exp(-3 * r)) == pytest.approx(1.0, rel=1e-5)


def test_chart_round_trip(sads1):
    s = np.geomspace(2.1, 1e3, 400)
    back = sads1.chart.s_of_r(sads1.chart.r_of_s(s))
    assert np.max(np.abs(back - s)) < 1e-9


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=2.1, max_value=1e3))
def test_chart_round_trip_property(s):
    chart = make_sads(1.0).chart
    assert abs(float(chart.s_of_r(chart.r_of_s(s))) - s) < 1e-9


def test_sads_rejects_bad_mass():
    for bad in (0.0, -1.0, float("nan"), float("inf")):
        with pytest.raises(ValidationError):
            make_sads(bad)


def test_domain_check(sads1):
    with pytest.raises(ValidationError):
        curvature(sads1, 1.0)
    with pytest.raises(ValidationError):
        sads1.evaluate(float("nan"))


def test_gauss_equation_consistency(hyperbolic, sads1):
    metrics = [hyperbolic, sads1, make_perturbed(1.0, [(0.3, 5.0)]), make_glued(SHIPPED_SPEC)]
    for metric in metrics:
        for r in np.linspace(metric.boundary_r + 0.01, 12.0, 150):
            c = curvature(metric, float(r))
            H = sphere_report(metric, float(r)).H
            assert abs(2 * c.sphere_K - (c.scalar_R - 2 * c.ric_nn + H**2 / 2)) < 1e-7


def test_perturbed_decay():
    metric = make_perturbed(1.0, [(0.3, 5.0), (-0.1, 6.0)])
    assert perturbation_is_compliant(metric)
    r = np.linspace(6.0, 12.0, 25)
    scaled = np.array([abs(curvature(metric, float(x)).scalar_R_plus_6) * math.exp(5 * x) for x in r])
    assert np.max(scaled) < 10.0
    rate = fitting.decay_rate(np.column_stack([r, scaled * np.exp(-5 * r)]))
    assert rate <= -5 + 0.2


def test_perturbed_validation():
    assert not perturbation_is_compliant(make_perturbed(1.0, [(0.1, 3.0)]))
    with pytest.raises(ValidationError):
        make_perturbed(1.0, [])
    with pytest.raises(ValidationError):
        make_perturbed(1.0, [(1.0, -2.0)])
    with pytest.raises(ValidationError):
        make_perturbed(1.0, [(-2.0, 0.1)])


def test_glued_identity(sads1):
    knots = np.arange(2.05, 3.46, 0.05)
    spec = GluingSpec(1.0, (2.0, 3.5), tuple((float(r), float(sads1.phi(r))) for r in knots))
    glued = make_glued(spec)
    assert glued.kind is MetricKind.SPLINE_GLUED
    x = np.linspace(sads1.boundary_r, 6.0, 2001)
    assert np.max(np.abs(glued.phi(x) - sads1.phi(x))) < 1e-6


def test_glued_bulge_breaks_scalar_curvature(sads1):
    knots = np.arange(2.3, 3.3, 0.2)
    spec = GluingSpec(1.0, (2.0, 3.5), tuple((float(r), 1.3 * float(sads1.phi(r))) for r in knots))
    glued = make_glued(spec)
    R = [curvature(glued, float(r)).scalar_R for r in np.linspace(2.0, 3.5, 301)]
    assert min(R) < -6.0


def test_glued_is_sads_outside_interval(sads1):
    glued = make_glued(SHIPPED_SPEC)
    x = np.concatenate([np.linspace(sads1.boundary_r, 2.0, 50), np.linspace(3.5, 10.0, 50)])
    np.testing.assert_array_equal(glued.phi(x), sads1.phi(x))
    # C2 joins
    for r in SHIPPED_SPEC.glue_interval:
        for side in (r - 1e-7, r + 1e-7):
            a, b = glued.evaluate(side), sads1.evaluate(side)
            assert float(a.ddphi) == pytest.approx(float(b.ddphi), rel=1e-5)


def test_glued_errors():
    with pytest.raises(ValidationError):
        make_glued(GluingSpec(1.0, (2.0, 2.0), ((2.0, 5.0),)))
    with pytest.raises(ValidationError):
        make_glued(GluingSpec(1.0, (2.0, 3.5), ((2.5, 0.05), (3.0, 0.05))))
    with pytest.raises(ValidationError):
        make_glued(GluingSpec(1.0, (2.0, 3.5), ((4.0, 5.0),)))


def test_errors_are_typed():
    assert issubclass(ValidationError, ValueError)
    assert issubclass(ConvergenceError, ArithmeticError)
