"""Trading strategies as truncated sine series around the risk-neutral line.

A unit strategy ``a`` with ``a(0) = 0`` and ``a(1) = 1`` is written as

    a(t) = t + sum_{n=1}^{N} a_n sin(n pi t)

so the boundary values hold for every coefficient vector. The target size
``scale`` is carried as metadata; all coefficients describe the unit curve.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._validation import check_lam, check_n_terms, check_real, check_times, check_vector
from .exceptions import PreconditionError, ShapeError
from .quadrature import integrate_unit, vectorize_curve

BOUNDARY_TOL = 1e-9


@dataclass(frozen=True)
class StrategyCoeffs:
    """Sine coefficients ``a_1..a_N`` of a unit strategy plus its scale λ."""

    coeffs: np.ndarray
    scale: float = 1.0
    n_terms: int = field(init=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float, copy=True)
        if c.ndim != 1 or c.size == 0:
            raise ShapeError("coeffs must be a non-empty 1-d sequence")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "scale", check_lam(self.scale))
        object.__setattr__(self, "n_terms", c.size)

    @classmethod
    def zeros(cls, n_terms: int, scale: float = 1.0) -> "StrategyCoeffs":
        """The risk-neutral strategy ``a(t) = t``."""
        return cls(np.zeros(check_n_terms(n_terms)), scale)

    def __call__(self, t):
        return reconstruct(self, t)

    def derivative(self, t):
        return derivative_at(self, t)

    def scaled(self, t):
        """Position of the λ-scaled strategy, ``scale * a(t)``."""
        return self.scale * reconstruct(self, t)

    def with_coeffs(self, coeffs) -> "StrategyCoeffs":
        return StrategyCoeffs(coeffs, self.scale)


def _modes(n_terms: int) -> np.ndarray:
    return np.arange(1, n_terms + 1, dtype=float)


def sine_basis(t, n_terms: int) -> np.ndarray:
    """Matrix ``sin(n pi t_k)`` with shape ``(len(t), n_terms)``."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    return np.sin(np.pi * np.outer(t, _modes(n_terms)))


def dsine_basis(t, n_terms: int) -> np.ndarray:
    """Matrix ``n pi cos(n pi t_k)``: derivatives of the sine basis."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    n = _modes(n_terms)
    return np.pi * n * np.cos(np.pi * np.outer(t, n))


def _as_coeffs(s) -> np.ndarray:
    return s.coeffs if isinstance(s, StrategyCoeffs) else check_vector(s, name="coeffs")


def reconstruct(s, t):
    """Evaluate ``t + sum a_n sin(n pi t)`` for a strategy or raw coefficients."""
    c = _as_coeffs(s)
    arr, scalar = check_times(t)
    flat = arr.ravel()
    values = flat + sine_basis(flat, c.size) @ c
    # sin(n pi) is ~1e-16 in floating point; the boundary values are exact by construction
    values[flat == 0.0] = 0.0
    values[flat == 1.0] = 1.0
    return float(values[0]) if scalar else values.reshape(arr.shape)


def derivative_at(s, t):
    """Trading rate ``1 + sum a_n n pi cos(n pi t)``."""
    c = _as_coeffs(s)
    arr, scalar = check_times(t)
    flat = arr.ravel()
    values = 1.0 + dsine_basis(flat, c.size) @ c
    return float(values[0]) if scalar else values.reshape(arr.shape)


def fit_from_function(f, n_terms: int, *, scale: float = 1.0, abs_tol: float = 1e-10) -> StrategyCoeffs:
    """Sine coefficients ``a_n = 2 int_0^1 (f(t) - t) sin(n pi t) dt`` of a unit curve.

    Raises
    ------
    PreconditionError
        If ``f(0) != 0`` or ``f(1) != 1`` beyond 1e-9.
    NumericError
        If the quadrature does not reach ``abs_tol`` for every coefficient.
    """
    n_terms = check_n_terms(n_terms)
    fv = vectorize_curve(f)
    ends = fv(np.array([0.0, 1.0]))
    if abs(ends[0]) > BOUNDARY_TOL or abs(ends[1] - 1.0) > BOUNDARY_TOL:
        raise PreconditionError(f"strategy must satisfy f(0)=0, f(1)=1; got f(0)={ends[0]:.3g}, f(1)={ends[1]:.3g}")
    n = _modes(n_terms)

    def integrand(t):
        return 2.0 * (fv(t) - t)[None, :] * np.sin(np.pi * np.outer(n, t))

    return StrategyCoeffs(integrate_unit(integrand, abs_tol=abs_tol), scale)


def convex_combine(s1: StrategyCoeffs, s2: StrategyCoeffs, gamma: float) -> StrategyCoeffs:
    """Coefficientwise ``gamma * s1 + (1 - gamma) * s2``.

    Equal to the pointwise convex combination of the two curves because the
    map from coefficients to curves is affine with a shared offset ``t``.
    """
    gamma = check_real(gamma, "gamma", low=0.0, high=1.0)
    if s1.n_terms != s2.n_terms:
        raise ShapeError(f"n_terms differ: {s1.n_terms} vs {s2.n_terms}")
    if s1.scale != s2.scale:
        raise ShapeError(f"scales differ: {s1.scale} vs {s2.scale}")
    if gamma == 1.0:
        return s1
    if gamma == 0.0:
        return s2
    return StrategyCoeffs(gamma * s1.coeffs + (1.0 - gamma) * s2.coeffs, s1.scale)


def l2_distance(s1, s2) -> float:
    """L2 distance on [0, 1] of the reconstructed curves, by orthogonality."""
    c1, c2 = _as_coeffs(s1), _as_coeffs(s2)
    if c1.size != c2.size:
        raise ShapeError(f"n_terms differ: {c1.size} vs {c2.size}")
    d = c1 - c2
    return float(np.sqrt(0.5 * np.dot(d, d)))


def l2_distance_quad(f, g, *, abs_tol: float = 1e-12) -> float:
    """L2 distance of two arbitrary curves on [0, 1] by quadrature."""
    fv, gv = vectorize_curve(f), vectorize_curve(g)
    sq = integrate_unit(lambda t: (fv(t) - gv(t)) ** 2, abs_tol=abs_tol)
    return float(np.sqrt(max(sq, 0.0)))
