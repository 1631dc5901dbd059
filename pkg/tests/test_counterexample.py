import pytest

from sadslab import SHIPPED_SPEC, control_demo, counterexample_demo, make_glued
from sadslab.counterexample import VERDICT_BEATEN, VERDICT_SURVIVE, analyze_metric

# frozen oracles for the shipped gluing
MIN_R = -15.990
DRIFT = -147.055
A_STAR = 3439.4


@pytest.fixture(scope="module")
def report():
    return counterexample_demo()


def test_shipped_counterexample(report):
    assert report.min_scalar_R < -6
    assert report.min_scalar_R == pytest.approx(MIN_R, abs=1e-2)
    assert report.drift_star < 0
    assert report.drift_star == pytest.approx(DRIFT, abs=1e-2)
    assert report.verdict == VERDICT_BEATEN
    assert report.threshold_area == pytest.approx(A_STAR, rel=1e-3)


def test_threshold_is_beyond_glue_region(report):
    glued = make_glued(SHIPPED_SPEC)
    assert report.threshold_area >= float(glued.area(SHIPPED_SPEC.glue_interval[1]))


def test_control(sads1):
    rep = control_demo(1.0)
    assert rep.drift_star > 0
    assert rep.verdict == VERDICT_SURVIVE
    assert rep.threshold_area is None
    assert rep.min_scalar_R == pytest.approx(-6.0, abs=1e-9)


def test_hyperbolic_has_no_threshold(hyperbolic):
    rep = analyze_metric(hyperbolic)
    assert rep.verdict == VERDICT_SURVIVE


def test_report_dict(report):
    d = report.as_dict()
    assert d["metric"]["kind"] == "glued"
    assert d["verdict"] == VERDICT_BEATEN
