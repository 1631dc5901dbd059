"""Least-squares fits of sampled data against small asymptotic bases."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import RankDeficiencyError, ValidationError

MAX_CONDITION = 1.0e10


@dataclass(frozen=True)
class BasisFunction:
    name: str
    func: Callable[[np.ndarray], np.ndarray]

    def __call__(self, x):
        return np.broadcast_to(np.asarray(self.func(np.asarray(x, dtype=float)), dtype=float), np.shape(x))


def constant() -> BasisFunction:
    return BasisFunction("1", lambda x: np.ones_like(x))


def linear() -> BasisFunction:
    return BasisFunction("x", lambda x: x)


def exp_decay(k: float) -> BasisFunction:
    """``exp(-k x)``."""
    return BasisFunction(f"exp(-{k:g}x)", lambda x: np.exp(-k * x))


def power(p: float) -> BasisFunction:
    """``x**p``."""
    return BasisFunction(f"x^{p:g}", lambda x: x**p)


def log() -> BasisFunction:
    return BasisFunction("log(x)", np.log)


@dataclass(frozen=True)
class ExpansionFit:
    basis: tuple[BasisFunction, ...]
    coefficients: np.ndarray
    residual_norm: float
    condition_estimate: float
    window: tuple[float, float]

    @property
    def names(self) -> list[str]:
        return [b.name for b in self.basis]

    def coefficient(self, name: str) -> float:
        return float(self.coefficients[self.names.index(name)])

    def predict(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return sum(c * b(x) for c, b in zip(self.coefficients, self.basis))

    def to_dict(self) -> dict:
        return {
            "basis": self.names,
            "coefficients": [float(c) for c in self.coefficients],
            "residual_norm": self.residual_norm,
            "condition_estimate": self.condition_estimate,
            "window": list(self.window),
        }


def fit_expansion(samples, basis: Sequence[BasisFunction], weights=None) -> ExpansionFit:
    """Fit ``y ~ sum_j c_j basis_j(x)`` by least squares.

    Columns are scaled to unit norm and the system is solved through a QR
    factorization, which is the orthogonalized form of the normal equations.
    ``residual_norm`` is the max-norm of the (unweighted) residual over the
    samples.  Raises :class:`RankDeficiencyError` when the scaled design
    matrix has condition number above ``1e10``.
    """
    data = np.asarray(samples, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        raise ValidationError("samples must be a sequence of (x, y) pairs")
    basis = tuple(basis)
    if not basis:
        raise ValidationError("empty basis")
    if len(data) < len(basis) + 2:
        raise ValidationError(f"need at least {len(basis) + 2} samples for {len(basis)} basis functions")
    x, y = data[:, 0], data[:, 1]
    design = np.column_stack([b(x) for b in basis])
    if not np.all(np.isfinite(design)) or not np.all(np.isfinite(y)):
        raise ValidationError("basis or data not finite on the sample window")
    w = np.ones_like(y) if weights is None else np.asarray(weights, dtype=float)

    scaled = design * w[:, None]
    norms = np.linalg.norm(scaled, axis=0)
    if np.any(norms == 0):
        raise RankDeficiencyError("basis function vanishes on every sample")
    scaled = scaled / norms
    sv = np.linalg.svd(scaled, compute_uv=False)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else float("inf")
    if not cond <= MAX_CONDITION:
        raise RankDeficiencyError(f"design matrix is rank deficient (condition {cond:.3g})")

    q, r = np.linalg.qr(scaled)
    coef = np.linalg.solve(r, q.T @ (y * w)) / norms
    resid = y - design @ coef
    return ExpansionFit(basis, coef, float(np.max(np.abs(resid))), cond, (float(x.min()), float(x.max())))


def decay_rate(samples) -> float:
    """Slope of ``log y`` against ``x``; ``y`` must be positive."""
    data = np.asarray(samples, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        raise ValidationError("samples must be a sequence of (x, y) pairs")
    if np.any(data[:, 1] <= 0):
        raise ValidationError("decay_rate needs strictly positive y")
    if np.any(np.diff(data[:, 0]) <= 0):
        raise ValidationError("decay_rate needs increasing x")
    fit = fit_expansion(np.column_stack([data[:, 0], np.log(data[:, 1])]), [constant(), linear()])
    return fit.coefficient("x")
