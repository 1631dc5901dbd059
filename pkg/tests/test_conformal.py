import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from sadslab import AliasingError, ValidationError
from sadslab.conformal import (
    MobiusMap,
    MobiusParams,
    SphereField,
    analyze,
    ball_model_r,
    dirichlet_energy,
    disk_plane_angular_residual,
    disk_plane_residual,
    index,
    invariance_trials,
    make_grid,
    mobius_conformal_factor,
    mobius_pullback,
    random_field,
    real_harmonics,
    s_functional,
)


@pytest.fixture(scope="module")
def grid():
    return make_grid(64, 128)


def test_weights_sum(grid):
    assert grid.weights.sum() == pytest.approx(4 * math.pi, abs=1e-12)


def test_quadrature_exactness():
    g = make_grid(16, 32)
    Y = real_harmonics(15, *g.angles())
    gram = np.einsum("kij,lij,ij->kl", Y, Y, g.weights)
    assert np.max(np.abs(gram - np.eye(len(gram)))) < 1e-12


def test_grid_validation():
    with pytest.raises(ValidationError):
        make_grid(8, 10)


def test_analysis_inverts_synthesis(grid):
    rng = np.random.default_rng(3)
    coef = rng.standard_normal(81)
    u = SphereField.from_coefficients(grid, coef)
    np.testing.assert_allclose(analyze(grid, u.values, 8), coef, atol=1e-12)


def test_s_functional_examples(grid):
    assert s_functional(SphereField.constant(grid, 0.0)) == 0.0
    assert s_functional(SphereField.constant(grid, 1.5)) == pytest.approx(-8 * math.pi * 1.5, rel=1e-13)
    coef = np.zeros(4)
    coef[index(1, 0)] = 1.0
    assert s_functional(SphereField.from_coefficients(grid, coef)) == pytest.approx(2.0, abs=1e-12)


def test_y10_is_normalized_cos_theta(grid):
    u = SphereField.from_function(grid, lambda p: math.sqrt(3 / (4 * math.pi)) * p[..., 2], 1)
    assert dirichlet_energy(u) == pytest.approx(2.0, abs=1e-12)


def test_s_functional_aliasing(grid):
    coef = np.zeros((34) ** 2)
    coef[-1] = 1.0
    with pytest.raises(AliasingError):
        s_functional(SphereField.from_coefficients(grid, coef))


def test_conformal_factor_examples():
    pts = Rotation.random(5, random_state=0).apply([0, 0, 1.0])
    rot = Rotation.random(random_state=1)
    for p in pts:
        assert abs(mobius_conformal_factor(MobiusParams(), p)) < 1e-15
        assert abs(mobius_conformal_factor(MobiusParams(rotation=rot), p)) < 1e-15
    assert mobius_conformal_factor(MobiusParams(dilation=2.0), [0, 0, 1.0]) == pytest.approx(math.log(2), abs=1e-15)
    with pytest.raises(ValidationError):
        mobius_conformal_factor(MobiusParams(dilation=0.0), [0, 0, 1.0])
    with pytest.raises(ValidationError):
        mobius_conformal_factor(MobiusParams(dilation=-1.0), [0, 0, 1.0])


def test_stereographic_factor_formula():
    # with z the stereographic coordinate from the south pole (north pole at z = 0),
    # rho = log(t (1 + |z|^2) / (1 + t^2 |z|^2))
    t = 2.0
    theta = np.linspace(0.1, 3.0, 7)
    pts = np.stack([np.sin(theta), np.zeros_like(theta), np.cos(theta)], axis=-1)
    z = np.tan(theta / 2)
    want = np.log(t * (1 + z**2) / (1 + t**2 * z**2))
    got = MobiusMap.from_params(MobiusParams(dilation=t)).log_conformal_factor(pts)
    np.testing.assert_allclose(got, want, atol=1e-14)


def test_rotation_acts_as_rotation():
    rng = np.random.default_rng(0)
    pts = rng.standard_normal((50, 3))
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    rot = Rotation.random(random_state=7)
    psi = MobiusMap.from_params(MobiusParams(rotation=rot))
    assert np.max(np.abs(psi(pts) - rot.apply(pts))) < 1e-14


@settings(max_examples=30, deadline=None)
@given(
    st.floats(0.3, 3.0),
    st.floats(0.3, 3.0),
    st.integers(0, 2**30),
)
def test_composition_rule(t1, t2, seed):
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal((20, 3))
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    psi = MobiusMap.from_params(MobiusParams(Rotation.random(random_state=seed), t1, tuple(rng.standard_normal(3))))
    chi = MobiusMap.from_params(MobiusParams(Rotation.random(random_state=seed + 1), t2, tuple(rng.standard_normal(3))))
    lhs = psi.compose(chi).log_conformal_factor(pts)
    rhs = psi.log_conformal_factor(chi(pts)) + chi.log_conformal_factor(pts)
    assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_pullback_identity(grid):
    u = random_field(grid, 8, np.random.default_rng(1))
    v = mobius_pullback(u, MobiusParams())
    np.testing.assert_allclose(v.values, u.values, atol=1e-12)


def test_pullback_of_zero(grid):
    v = mobius_pullback(SphereField.constant(grid, 0.0), MobiusParams(dilation=2.0))
    assert abs(s_functional(v)) < 1e-6


@pytest.mark.parametrize("t", [0.5, 2.0])
def test_pullback_invariance(grid, t):
    rng = np.random.default_rng(11)
    for _ in range(5):
        u = random_field(grid, 8, rng)
        params = MobiusParams(Rotation.random(random_state=int(rng.integers(1 << 30))), t, tuple(rng.standard_normal(3)))
        v = mobius_pullback(u, params)
        assert abs(s_functional(u) - s_functional(v)) < 1e-6
        assert v.spectral_tail < 1e-8


def test_pullback_flags_unresolved_tail():
    g = make_grid(16, 32)
    u = random_field(g, 8, np.random.default_rng(0))
    with pytest.raises(AliasingError):
        mobius_pullback(u, MobiusParams(dilation=8.0))


def test_pullback_rejects_wide_input(grid):
    u = random_field(grid, 40, np.random.default_rng(0))
    with pytest.raises(AliasingError):
        mobius_pullback(u, MobiusParams(dilation=2.0))


def test_coarse_grid_cannot_resolve_dilations():
    with pytest.raises(AliasingError):
        invariance_trials(5, trials=3, grid=make_grid(32, 64))


def test_invariance_trials_seeded():
    a = invariance_trials(5, trials=3)
    b = invariance_trials(5, trials=3)
    assert [t.s_v for t in a] == [t.s_v for t in b]
    assert all(0.5 <= t.dilation <= 2.0 for t in a)


def test_ball_model():
    assert ball_model_r(0.5) == pytest.approx(math.log(3), rel=1e-15)
    assert ball_model_r(1e-12) == pytest.approx(2e-12, rel=1e-6)
    for s in (0.1, 0.5, 0.9, 0.99):
        assert abs(disk_plane_residual(s)) < 1e-12
        assert abs(disk_plane_angular_residual(s)) < 1e-12
    for bad in (0.0, 1.0, -0.5, 1.5):
        with pytest.raises(ValidationError):
            ball_model_r(bad)
