"""Conformal toolkit on the unit 2-sphere.

Fields live on a Gauss-Legendre (in ``cos theta``) by uniform (in ``phi``)
product grid.  Real orthonormal spherical harmonics are indexed
``k = l*l + l + m`` for ``-l <= m <= l``; ``m > 0`` carries ``cos(m phi)`` and
``m < 0`` carries ``sin(|m| phi)``.

Conformal diffeomorphisms are stored as ``SL(2, C)`` matrices acting on unit
spinors ``(zeta1, zeta2) = (sin(theta/2) e^{i phi}, cos(theta/2))``.  The
north pole has spinor ``(0, 1)``, so the stereographic coordinate is
``z = zeta1 / zeta2`` and a dilation ``z -> t z`` expands around the north
pole.  For ``M`` with unit determinant the pullback conformal factor at a
point with unit spinor ``zeta`` is ``exp(rho) = 1 / |M zeta|^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AliasingError, ValidationError

TAIL_TOL = 1.0e-8


@dataclass(frozen=True, eq=False)
class SphereGrid:
    n_theta: int
    n_phi: int
    x: np.ndarray = field(init=False, repr=False)
    theta: np.ndarray = field(init=False, repr=False)
    phi: np.ndarray = field(init=False, repr=False)
    gl_weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.n_theta < 2 or self.n_phi < 2 * self.n_theta - 1:
            raise ValidationError("grid needs n_theta >= 2 and n_phi >= 2 n_theta - 1")
        x, w = np.polynomial.legendre.leggauss(self.n_theta)
        x, w = x[::-1], w[::-1]
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "theta", np.arccos(x))
        object.__setattr__(self, "phi", 2.0 * np.pi * np.arange(self.n_phi) / self.n_phi)
        object.__setattr__(self, "gl_weights", w)

    @property
    def shape(self):
        return (self.n_theta, self.n_phi)

    @property
    def weights(self) -> np.ndarray:
        return np.outer(self.gl_weights, np.full(self.n_phi, 2.0 * np.pi / self.n_phi))

    @property
    def max_degree(self) -> int:
        """Largest degree the analysis transform resolves."""
        return min(self.n_theta - 1, (self.n_phi - 1) // 2)

    def angles(self):
        return np.meshgrid(self.theta, self.phi, indexing="ij")

    def points(self) -> np.ndarray:
        th, ph = self.angles()
        return np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=-1)

    def integrate(self, values) -> float:
        return float(np.sum(self.weights * values))


def make_grid(n_theta: int, n_phi: int) -> SphereGrid:
    return SphereGrid(int(n_theta), int(n_phi))


def n_coefficients(lmax: int) -> int:
    return (lmax + 1) ** 2


def index(ell: int, m: int) -> int:
    return ell * ell + ell + m


def degrees(lmax: int) -> np.ndarray:
    return np.repeat(np.arange(lmax + 1), 2 * np.arange(lmax + 1) + 1)


def legendre_table(lmax: int, x) -> np.ndarray:
    """Orthonormal associated Legendre functions ``P[l, m, :]`` at ``x = cos theta``.

    Normalized so that ``P[l, m](cos theta) * e^{i m phi}`` has unit L2 norm on
    the sphere (no Condon-Shortley phase).
    """
    x = np.asarray(x, dtype=float)
    sin_t = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    p = np.zeros((lmax + 1, lmax + 1) + x.shape)
    p[0, 0] = math.sqrt(1.0 / (4.0 * math.pi))
    for m in range(1, lmax + 1):
        p[m, m] = math.sqrt((2 * m + 1) / (2.0 * m)) * sin_t * p[m - 1, m - 1]
    for m in range(0, lmax):
        p[m + 1, m] = math.sqrt(2 * m + 3) * x * p[m, m]
    for m in range(0, lmax + 1):
        for ell in range(m + 2, lmax + 1):
            a = math.sqrt((4.0 * ell * ell - 1.0) / (ell * ell - m * m))
            b = math.sqrt(((ell - 1.0) ** 2 - m * m) / (4.0 * (ell - 1.0) ** 2 - 1.0))
            p[ell, m] = a * (x * p[ell - 1, m] - b * p[ell - 2, m])
    return p


def real_harmonics(lmax: int, theta, phi) -> np.ndarray:
    """Matrix ``Y[k, ...]`` of real orthonormal harmonics up to degree ``lmax``."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    p = legendre_table(lmax, np.cos(theta))
    out = np.empty((n_coefficients(lmax),) + np.broadcast(theta, phi).shape)
    root2 = math.sqrt(2.0)
    for ell in range(lmax + 1):
        out[index(ell, 0)] = p[ell, 0]
        for m in range(1, ell + 1):
            out[index(ell, m)] = root2 * p[ell, m] * np.cos(m * phi)
            out[index(ell, -m)] = root2 * p[ell, m] * np.sin(m * phi)
    return out


def analyze(grid: SphereGrid, values, lmax: int | None = None) -> np.ndarray:
    """Harmonic coefficients of grid values by FFT in ``phi`` and Gauss-Legendre in ``theta``."""
    lmax = grid.max_degree if lmax is None else int(lmax)
    if lmax > grid.max_degree:
        raise AliasingError(f"degree {lmax} exceeds grid capacity {grid.max_degree}")
    values = np.asarray(values, dtype=float)
    if values.shape != grid.shape:
        raise ValidationError(f"values have shape {values.shape}, grid is {grid.shape}")
    four = np.fft.rfft(values, axis=1) * (2.0 * np.pi / grid.n_phi)
    p = legendre_table(lmax, grid.x) * grid.gl_weights
    coef = np.zeros(n_coefficients(lmax))
    root2 = math.sqrt(2.0)
    for m in range(lmax + 1):
        proj_c = p[m:, m] @ four[:, m].real
        if m == 0:
            coef[[index(ell, 0) for ell in range(lmax + 1)]] = proj_c
            continue
        proj_s = p[m:, m] @ (-four[:, m].imag)
        ells = range(m, lmax + 1)
        coef[[index(ell, m) for ell in ells]] = root2 * proj_c
        coef[[index(ell, -m) for ell in ells]] = root2 * proj_s
    return coef


def synthesize(coefficients, theta, phi) -> np.ndarray:
    coefficients = np.asarray(coefficients, dtype=float)
    lmax = int(round(math.sqrt(len(coefficients)))) - 1
    if n_coefficients(lmax) != len(coefficients):
        raise ValidationError("coefficient vector length is not a square")
    return np.tensordot(coefficients, real_harmonics(lmax, theta, phi), axes=1)


def _angles_of(points):
    points = np.asarray(points, dtype=float)
    theta = np.arccos(np.clip(points[..., 2], -1.0, 1.0))
    phi = np.arctan2(points[..., 1], points[..., 0])
    return theta, phi


@dataclass(frozen=True, eq=False)
class SphereField:
    """Scalar function sampled on ``grid``; ``band_limit`` bounds its harmonic degree.

    Fields that are not exactly band-limited (Moebius pullbacks) carry the
    measured ``spectral_tail``: the coefficient norm in the top quarter of
    the resolvable degrees.  A small tail certifies that the grid resolves
    the field even when ``band_limit`` exceeds ``n_theta / 2``.
    """

    grid: SphereGrid
    values: np.ndarray
    band_limit: int
    spectral_tail: float | None = None

    def __post_init__(self):
        if np.shape(self.values) != self.grid.shape:
            raise ValidationError("field values do not match the grid")

    @classmethod
    def from_coefficients(cls, grid: SphereGrid, coefficients) -> "SphereField":
        coefficients = np.asarray(coefficients, dtype=float)
        lmax = int(round(math.sqrt(len(coefficients)))) - 1
        th, ph = grid.angles()
        return cls(grid, synthesize(coefficients, th, ph), lmax)

    @classmethod
    def from_function(cls, grid: SphereGrid, func, band_limit: int) -> "SphereField":
        """``func`` takes an array of unit vectors ``(..., 3)``."""
        return cls(grid, np.asarray(func(grid.points()), dtype=float), int(band_limit))

    @classmethod
    def constant(cls, grid: SphereGrid, c: float) -> "SphereField":
        return cls(grid, np.full(grid.shape, float(c)), 0)

    def coefficients(self, lmax: int | None = None) -> np.ndarray:
        return analyze(self.grid, self.values, self.band_limit if lmax is None else lmax)

    def __call__(self, points) -> np.ndarray:
        """Evaluate the band-limited expansion at arbitrary unit vectors."""
        theta, phi = _angles_of(points)
        return synthesize(self.coefficients(), theta, phi)

    def __sub__(self, other):
        other_values = other.values if isinstance(other, SphereField) else other
        limit = max(self.band_limit, getattr(other, "band_limit", 0))
        return SphereField(self.grid, self.values - other_values, limit)


def random_field(grid: SphereGrid, lmax: int, rng: np.random.Generator, scale: float = 1.0) -> SphereField:
    """Band-limited field with i.i.d. normal harmonic coefficients up to ``lmax``."""
    return SphereField.from_coefficients(grid, scale * rng.standard_normal(n_coefficients(lmax)))


def _check_band(u: SphereField, grid: SphereGrid, allow_certified: bool = True):
    if u.grid.shape != grid.shape:
        raise ValidationError("field and grid differ")
    certified = allow_certified and u.spectral_tail is not None and u.spectral_tail <= TAIL_TOL
    if u.band_limit > grid.n_theta // 2 and not certified:
        raise AliasingError(f"band limit {u.band_limit} exceeds n_theta/2 = {grid.n_theta // 2}")


def dirichlet_energy(u: SphereField, grid: SphereGrid | None = None) -> float:
    """``int |grad u|^2 = sum l(l+1) c_lm^2`` over all resolvable degrees."""
    grid = u.grid if grid is None else grid
    coef = analyze(grid, u.values)
    return float(np.sum(degrees(grid.max_degree) * (degrees(grid.max_degree) + 1) * coef**2))


def s_functional(u: SphereField, grid: SphereGrid | None = None) -> float:
    """``S(u) = int |grad u|^2 - 2 int u`` with the gradient term computed spectrally."""
    grid = u.grid if grid is None else grid
    _check_band(u, grid)
    return dirichlet_energy(u, grid) - 2.0 * grid.integrate(u.values)


# ---------------------------------------------------------------------------
# Moebius maps

_SIGMA = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
# our spinor-to-point map is the standard Hopf map composed with diag(1, -1, -1)
_FLIP = np.array([1.0, -1.0, -1.0])


def spinors(points) -> tuple[np.ndarray, np.ndarray]:
    points = np.asarray(points, dtype=float)
    x, y, z = points[..., 0], points[..., 1], points[..., 2]
    rho = np.hypot(x, y)
    phase = np.where(rho > 0, (x + 1j * y) / np.where(rho > 0, rho, 1.0), 1.0)
    return np.sqrt(np.clip((1.0 - z) / 2.0, 0.0, None)) * phase, np.sqrt(np.clip((1.0 + z) / 2.0, 0.0, None)) + 0j


def points_from_spinors(z1, z2) -> np.ndarray:
    norm = np.abs(z1) ** 2 + np.abs(z2) ** 2
    cross = 2.0 * z1 * np.conj(z2)
    return np.stack([cross.real / norm, cross.imag / norm, (np.abs(z2) ** 2 - np.abs(z1) ** 2) / norm], axis=-1)


def _rotation_matrix(rotation) -> np.ndarray:
    if rotation is None:
        return np.eye(3)
    if hasattr(rotation, "as_matrix"):
        return rotation.as_matrix()
    mat = np.asarray(rotation, dtype=float)
    if mat.shape != (3, 3) or not np.allclose(mat @ mat.T, np.eye(3), atol=1e-12) or np.linalg.det(mat) < 0:
        raise ValidationError("rotation must be a proper 3x3 orthogonal matrix")
    return mat


def su2_from_rotation(rotation) -> np.ndarray:
    """Spinor matrix inducing ``rotation`` on points (up to sign)."""
    from scipy.spatial.transform import Rotation

    rotvec = Rotation.from_matrix(_rotation_matrix(rotation)).as_rotvec()
    angle = float(np.linalg.norm(rotvec))
    if angle == 0.0:
        return np.eye(2, dtype=complex)
    axis = _FLIP * rotvec / angle
    gen = sum(a * s for a, s in zip(axis, _SIGMA))
    return math.cos(angle / 2.0) * np.eye(2) - 1j * math.sin(angle / 2.0) * gen


def _rotation_to_north(center) -> np.ndarray:
    n = np.asarray(center, dtype=float)
    norm = np.linalg.norm(n)
    if not norm > 0:
        raise ValidationError("center direction must be non-zero")
    n = n / norm
    north = np.array([0.0, 0.0, 1.0])
    axis = np.cross(n, north)
    s, c = np.linalg.norm(axis), float(n @ north)
    if s < 1e-15:
        return np.eye(3) if c > 0 else np.diag([1.0, -1.0, -1.0])
    k = axis / s
    kx = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + s * kx + (1 - c) * kx @ kx


@dataclass(frozen=True)
class MobiusParams:
    """``psi = rotation o dilation``, the dilation being ``z -> t z`` about ``center``."""

    rotation: object = None
    dilation: float = 1.0
    center: tuple[float, float, float] = (0.0, 0.0, 1.0)


@dataclass(frozen=True, eq=False)
class MobiusMap:
    matrix: np.ndarray

    @classmethod
    def from_params(cls, params: MobiusParams) -> "MobiusMap":
        t = float(params.dilation)
        if not t > 0:
            raise ValidationError(f"dilation must be positive, got {t!r}")
        q = su2_from_rotation(_rotation_to_north(params.center))
        d = np.diag([math.sqrt(t), 1.0 / math.sqrt(t)]).astype(complex)
        dil = np.linalg.inv(q) @ d @ q
        return cls(su2_from_rotation(params.rotation) @ dil)

    def __post_init__(self):
        det = np.linalg.det(self.matrix)
        if abs(det) < 1e-300:
            raise ValidationError("singular Moebius matrix")
        object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=complex) / np.sqrt(det))

    def _image_spinors(self, points):
        z1, z2 = spinors(points)
        a, b, c, d = self.matrix.ravel()
        return a * z1 + b * z2, c * z1 + d * z2

    def __call__(self, points) -> np.ndarray:
        return points_from_spinors(*self._image_spinors(points))

    def log_conformal_factor(self, points) -> np.ndarray:
        """``rho`` with ``psi^* g = e^{2 rho} g`` at each point."""
        w1, w2 = self._image_spinors(points)
        return -np.log(np.abs(w1) ** 2 + np.abs(w2) ** 2)

    def compose(self, inner: "MobiusMap") -> "MobiusMap":
        """``self o inner``."""
        return MobiusMap(self.matrix @ inner.matrix)


def _as_map(psi) -> MobiusMap:
    return psi if isinstance(psi, MobiusMap) else MobiusMap.from_params(psi)


def mobius_conformal_factor(psi_params, point) -> float:
    return float(_as_map(psi_params).log_conformal_factor(np.asarray(point, dtype=float)))


def mobius_pullback(u: SphereField, psi_params, grid: SphereGrid | None = None) -> SphereField:
    """``v = u o psi - rho_psi``, so that ``psi^*(e^{-2u} g) = e^{-2v} g``.

    The pullback is not band-limited.  Raises :class:`AliasingError` if ``u``
    exceeds half the grid capacity or if the coefficients of ``v`` in the top
    quarter of the resolvable degrees have norm above ``1e-8``.  The returned
    ``band_limit`` is the degree beyond which the remaining coefficient norm
    falls below ``1e-8``.
    """
    grid = u.grid if grid is None else grid
    _check_band(u, grid, allow_certified=False)
    psi = _as_map(psi_params)
    nodes = grid.points()
    values = u(psi(nodes)) - psi.log_conformal_factor(nodes)
    coef = analyze(grid, values)
    top = grid.max_degree
    tail = float(np.linalg.norm(coef[n_coefficients((3 * top) // 4):]))
    if tail > TAIL_TOL:
        raise AliasingError(f"pullback spectral tail {tail:.3g} above degree {(3 * top) // 4} exceeds {TAIL_TOL}")
    # remaining[l] = norm of coefficients with degree > l
    sq = np.bincount(degrees(top), weights=coef**2)
    remaining = np.sqrt(np.append(np.cumsum(sq[::-1])[::-1][1:], 0.0))
    effective = int(np.argmax(remaining <= TAIL_TOL))
    return SphereField(grid, values, effective, tail)


def ball_model_r(s: float) -> float:
    """Hyperbolic distance from the origin of the ball-model point at Euclidean radius ``s``."""
    if not 0.0 < s < 1.0:
        raise ValidationError(f"s must lie in (0, 1), got {s!r}")
    return math.log1p(s) - math.log1p(-s)


def disk_plane_residual(s: float) -> float:
    """``(1 + cosh r)^-2 (dr/ds)^2 - 1`` at the ball-model radius ``s``."""
    r = ball_model_r(s)
    drds = 2.0 / (1.0 - s * s)
    return (drds / (1.0 + math.cosh(r))) ** 2 - 1.0


def disk_plane_angular_residual(s: float) -> float:
    """``(1 + cosh r)^-2 sinh(r)^2 - s^2``: the angular part of the same identity."""
    r = ball_model_r(s)
    return (math.sinh(r) / (1.0 + math.cosh(r))) ** 2 - s * s


@dataclass(frozen=True)
class InvarianceTrial:
    trial: int
    dilation: float
    s_u: float
    s_v: float

    @property
    def abs_diff(self) -> float:
        return abs(self.s_u - self.s_v)


def invariance_trials(
    seed: int,
    trials: int = 100,
    lmax: int = 8,
    grid: SphereGrid | None = None,
    t_range: tuple[float, float] = (0.5, 2.0),
) -> list[InvarianceTrial]:
    """Seeded comparison of ``S(u)`` with ``S(v)`` for random fields and Moebius maps.

    Each trial draws a degree-``lmax`` field with standard normal coefficients,
    a uniform random rotation, a random dilation center and a dilation uniform
    in ``t_range``.
    """
    from scipy.spatial.transform import Rotation

    if trials < 1:
        raise ValidationError("trials must be positive")
    lo, hi = t_range
    if not 0 < lo <= hi:
        raise ValidationError("dilation range must satisfy 0 < lo <= hi")
    grid = make_grid(64, 128) if grid is None else grid
    rng = np.random.default_rng(seed)
    out = []
    for k in range(trials):
        u = random_field(grid, lmax, rng)
        t = float(rng.uniform(lo, hi))
        center = rng.standard_normal(3)
        rot = Rotation.random(random_state=int(rng.integers(1 << 30)))
        v = mobius_pullback(u, MobiusParams(rotation=rot, dilation=t, center=tuple(center)), grid)
        out.append(InvarianceTrial(k, t, s_functional(u, grid), s_functional(v, grid)))
    return out
