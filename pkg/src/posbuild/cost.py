"""Trading cost as a quadratic form in one trader's sine coefficients.

The cost of the unit trader ``a`` against a λ-scaled opponent ``b`` is

    C_A = int_0^1 (a' + λ b') a' + κ (a + λ b) a' dt

and the opponent's cost is the λ b'-weighted analogue

    C_B = int_0^1 (a' + λ b') λ b' + κ (a + λ b) λ b' dt.

Substituting the sine expansions and integrating term by term turns each
into ``constant + linear . x + 1/2 x . Q x`` over the trader's own
coefficients ``x``, with the opponent folded into ``constant`` and
``linear``. :func:`quadrature_cost` integrates the same functionals
numerically and is the independent check on the assembly.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._validation import check_kappa, check_lam, check_n_terms, check_vector
from .exceptions import DomainError, ShapeError
from .quadrature import integrate_unit, vectorize_curve
from .strategy import StrategyCoeffs


class Perspective(str, Enum):
    A = "A"
    B = "B"


def _perspective(p) -> Perspective:
    try:
        return Perspective(p.value if isinstance(p, Perspective) else str(p).upper())
    except ValueError:
        raise DomainError(f"perspective must be 'A' or 'B', got {p!r}") from None


# ---------------------------------------------------------------------------
# trigonometric integrals on [0, 1]

TRIG_KINDS = ("sin", "cos", "t_cos", "cos_cos", "cos_sin")


def trig_integral(kind: str, n: int, m: int = 0) -> float:
    """Closed-form integrals over [0, 1] used by the cost assembly.

    ``sin``: int sin(n pi t); ``cos``: int cos(n pi t); ``t_cos``: int t cos(n pi t);
    ``cos_cos``: int cos(n pi t) cos(m pi t); ``cos_sin``: int cos(n pi t) sin(m pi t).
    """
    if kind not in TRIG_KINDS:
        raise DomainError(f"unknown kind {kind!r}; expected one of {TRIG_KINDS}")
    if n < 0 or m < 0:
        raise DomainError("indices must be non-negative")
    n, m = int(n), int(m)
    if kind == "sin":
        return 2.0 / (n * np.pi) if n % 2 == 1 else 0.0
    if kind == "cos":
        return 1.0 if n == 0 else 0.0
    if kind == "t_cos":
        if n == 0:
            return 0.5
        return -2.0 / (n * n * np.pi**2) if n % 2 == 1 else 0.0
    if kind == "cos_cos":
        if n != m:
            return 0.0
        return 1.0 if n == 0 else 0.5
    # cos_sin
    if (n + m) % 2 == 1:
        return 2.0 * m / (np.pi * (m * m - n * n))
    return 0.0


class TrigTable:
    """Precomputed :func:`trig_integral` values for indices ``0..size``."""

    def __init__(self, size: int):
        self.size = int(size)
        idx = range(self.size + 1)
        self.sin = np.array([trig_integral("sin", n) for n in idx])
        self.cos = np.array([trig_integral("cos", n) for n in idx])
        self.t_cos = np.array([trig_integral("t_cos", n) for n in idx])
        self.cos_cos = np.array([[trig_integral("cos_cos", n, m) for m in idx] for n in idx])
        self.cos_sin = np.array([[trig_integral("cos_sin", n, m) for m in idx] for n in idx])

    def __call__(self, kind: str, n: int, m: int = 0) -> float:
        table = getattr(self, kind)
        return float(table[n] if table.ndim == 1 else table[n, m])


def cross_weights(n_terms: int) -> np.ndarray:
    """Antisymmetric matrix ``W[n, m] = nm / (m^2 - n^2)`` for ``n + m`` odd, else 0.

    Indices are 1-based modes stored 0-based. ``pi n W[n, m] * 2 / pi`` is
    ``n pi int cos(n pi t) sin(m pi t)``, which is where the weight comes from.
    """
    n = np.arange(1, n_terms + 1)[:, None]
    m = np.arange(1, n_terms + 1)[None, :]
    odd = (n + m) % 2 == 1
    denom = np.where(odd, m * m - n * n, 1)
    return np.where(odd, (n * m) / denom, 0.0)


def cross_sum(x, y) -> float:
    """``sum_{n,m} x_n y_m nm/(m^2-n^2)`` over ``n + m`` odd.

    Summed pairwise over ``n < m`` so that ``cross_sum(x, x)`` cancels to
    exactly zero in floating point.
    """
    x = check_vector(x, name="x")
    y = check_vector(y, x.size, name="y")
    w = cross_weights(x.size)
    iu = np.triu_indices(x.size, k=1)
    pair = x[iu[0]] * y[iu[1]] - x[iu[1]] * y[iu[0]]
    return float(np.sum(w[iu] * pair))


def _odd_over_n(n_terms: int) -> np.ndarray:
    n = np.arange(1, n_terms + 1)
    return np.where(n % 2 == 1, 1.0 / n, 0.0)


# ---------------------------------------------------------------------------
# quadratic cost


@dataclass(frozen=True)
class QuadraticCost:
    """``constant + linear . x + 1/2 x . quad . x`` for one trader."""

    constant: float
    linear: np.ndarray
    quad: np.ndarray
    perspective: Perspective
    kappa: float
    lam: float

    @property
    def n_terms(self) -> int:
        return self.linear.size

    @property
    def quad_diagonal(self) -> np.ndarray:
        return np.diag(self.quad).copy()

    def evaluate(self, x) -> float:
        return evaluate(self, x)

    def gradient(self, x) -> np.ndarray:
        return gradient(self, x)

    def minimizer(self) -> np.ndarray:
        """Unconstrained stationary point ``-Q^{-1} q``."""
        return -self.linear / np.diag(self.quad)


def _opponent(opponent, n_terms: int | None) -> np.ndarray:
    c = opponent.coeffs if isinstance(opponent, StrategyCoeffs) else check_vector(opponent, name="opponent")
    if n_terms is not None and c.size != n_terms:
        raise ShapeError(f"opponent has {c.size} coefficients, expected {n_terms}")
    return c


def _own_cross_quad(n_terms: int, weight: float) -> np.ndarray:
    # the own-coefficient cross form x.Wx has symmetric part (W + W^T)/2, which is exactly zero
    w = cross_weights(n_terms)
    return weight * (w + w.T)


def assemble_cost_a(opponent, kappa: float, lam: float | None = None, n_terms: int | None = None) -> QuadraticCost:
    """Cost of the unit trader ``a`` against ``lam * b`` as a quadratic in ``a``.

    ``opponent`` holds the unit coefficients of ``b``; if it is a
    :class:`StrategyCoeffs` and ``lam`` is omitted, its scale is used.
    """
    kappa = check_kappa(kappa)
    if lam is None:
        lam = opponent.scale if isinstance(opponent, StrategyCoeffs) else 1.0
    lam = check_lam(lam)
    b = _opponent(opponent, n_terms)
    n_terms = check_n_terms(b.size)
    n = np.arange(1, n_terms + 1, dtype=float)
    odd = _odd_over_n(n_terms)
    w = cross_weights(n_terms)

    constant = 0.5 * (2.0 + kappa) * (1.0 + lam) + (2.0 * kappa * lam / np.pi) * np.dot(odd, b)
    linear = (
        0.5 * np.pi**2 * lam * n**2 * b
        - (2.0 * kappa * lam / np.pi) * odd
        + 2.0 * kappa * lam * (w @ b)
    )
    quad = np.diag(np.pi**2 * n**2) + _own_cross_quad(n_terms, 2.0 * kappa)
    return QuadraticCost(float(constant), linear, quad, Perspective.A, kappa, lam)


def assemble_cost_b(opponent, kappa: float, lam: float, n_terms: int | None = None) -> QuadraticCost:
    """Cost of the λ-scaled trader against the unit trader ``a``, quadratic in ``b``."""
    kappa = check_kappa(kappa)
    lam = check_lam(lam)
    a = _opponent(opponent, n_terms)
    n_terms = check_n_terms(a.size)
    n = np.arange(1, n_terms + 1, dtype=float)
    odd = _odd_over_n(n_terms)
    w = cross_weights(n_terms)

    constant = lam * (0.5 * (2.0 + kappa) * (1.0 + lam) + (2.0 * kappa / np.pi) * np.dot(odd, a))
    linear = lam * (0.5 * np.pi**2 * n**2 * a - (2.0 * kappa / np.pi) * odd + 2.0 * kappa * (w @ a))
    quad = np.diag(lam**2 * np.pi**2 * n**2) + _own_cross_quad(n_terms, 2.0 * kappa * lam**2)
    return QuadraticCost(float(constant), linear, quad, Perspective.B, kappa, lam)


def assemble_cost(perspective, opponent, kappa: float, lam: float, n_terms: int | None = None) -> QuadraticCost:
    if _perspective(perspective) is Perspective.A:
        return assemble_cost_a(opponent, kappa, lam, n_terms)
    return assemble_cost_b(opponent, kappa, lam, n_terms)


def evaluate(qc: QuadraticCost, x) -> float:
    x = check_vector(x, qc.n_terms)
    return float(qc.constant + qc.linear @ x + 0.5 * x @ qc.quad @ x)


def gradient(qc: QuadraticCost, x) -> np.ndarray:
    x = check_vector(x, qc.n_terms)
    return qc.linear + qc.quad @ x


def strategy_costs(a, b, kappa: float, lam: float) -> tuple[float, float]:
    """``(cost of a, cost of b)`` for coefficient vectors of both traders."""
    a_c, b_c = _opponent(a, None), _opponent(b, None)
    return (
        evaluate(assemble_cost_a(b_c, kappa, lam), a_c),
        evaluate(assemble_cost_b(a_c, kappa, lam), b_c),
    )


# ---------------------------------------------------------------------------
# quadrature oracle


def _curve_and_rate(fn, h: float = 1e-6):
    value = vectorize_curve(fn)
    if hasattr(fn, "derivative"):
        rate = vectorize_curve(fn.derivative)
    else:

        def rate(t):
            t = np.asarray(t, dtype=float)
            lo = np.clip(t - h, 0.0, 1.0)
            hi = np.clip(t + h, 0.0, 1.0)
            return (value(hi) - value(lo)) / (hi - lo)

    return value, rate


def quadrature_cost(a_fn, b_fn, kappa: float, lam: float, perspective="A", *, abs_tol: float = 1e-10) -> float:
    """Integrate the exact cost functional numerically.

    ``a_fn`` and ``b_fn`` are unit-strategy callables. A ``derivative``
    attribute is used for the trading rate when present (closed forms and
    :class:`StrategyCoeffs` provide one), otherwise central differences with
    step 1e-6 are taken.
    """
    kappa = check_kappa(kappa)
    lam = check_lam(lam)
    p = _perspective(perspective)
    a, da = _curve_and_rate(a_fn)
    b, db = _curve_and_rate(b_fn)

    if p is Perspective.A:

        def integrand(t):
            ra = da(t)
            return (ra + lam * db(t)) * ra + kappa * (a(t) + lam * b(t)) * ra

    else:

        def integrand(t):
            rb = lam * db(t)
            return (da(t) + rb) * rb + kappa * (a(t) + lam * b(t)) * rb

    return float(integrate_unit(integrand, n_points=4001, abs_tol=abs_tol))
