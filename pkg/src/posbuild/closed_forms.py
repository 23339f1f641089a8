"""Closed-form strategies: passive families, best responses and the equilibrium pair.

Every function here returns a :class:`Curve`, a unit-strategy callable on
[0, 1] that also knows its analytic first derivative.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._validation import check_kappa, check_lam, check_sigma, check_times
from .exceptions import ConsistencyError, DomainError

PASSIVE_KINDS = ("risk_neutral", "risk_averse", "eager")


@dataclass(frozen=True)
class Curve:
    """A unit strategy given by formulas for its value and trading rate."""

    value: Callable[[np.ndarray], np.ndarray]
    rate: Callable[[np.ndarray], np.ndarray]
    name: str = "curve"

    def __call__(self, t):
        arr, scalar = check_times(t)
        y = np.asarray(self.value(arr), dtype=float)
        y = np.broadcast_to(y, arr.shape).astype(float)
        return float(y) if scalar else y

    def derivative(self, t):
        arr, scalar = check_times(t)
        y = np.broadcast_to(np.asarray(self.rate(arr), dtype=float), arr.shape).astype(float)
        return float(y) if scalar else y

    def __repr__(self):
        return f"Curve({self.name})"


def _check_endpoints(curve: Curve, tol: float = 1e-9) -> Curve:
    y0, y1 = curve(0.0), curve(1.0)
    if abs(y0) > tol or abs(y1 - 1.0) > tol:
        raise ConsistencyError(f"{curve.name}: endpoints ({y0:.3g}, {y1:.3g}) differ from (0, 1)")
    return curve


def risk_neutral() -> Curve:
    return Curve(lambda t: t, lambda t: np.ones_like(t), "risk_neutral")


@dataclass(frozen=True)
class PassiveSpec:
    """A passive strategy family and its parameter."""

    kind: str
    sigma: float | None = None

    def __post_init__(self):
        if self.kind not in PASSIVE_KINDS:
            raise DomainError(f"unknown passive kind {self.kind!r}; expected one of {PASSIVE_KINDS}")
        if self.kind != "risk_neutral":
            if self.sigma is None:
                raise DomainError(f"{self.kind} requires sigma")
            object.__setattr__(self, "sigma", check_sigma(self.sigma))


def passive(spec: PassiveSpec | str, sigma: float | None = None) -> Curve:
    """Risk-neutral ``t``, risk-averse ``sinh(σt)/sinh σ`` or eager ``(e^{-σt}-1)/(e^{-σ}-1)``."""
    if isinstance(spec, str):
        spec = PassiveSpec(spec, sigma)
    if spec.kind == "risk_neutral":
        return risk_neutral()
    s = spec.sigma
    if spec.kind == "risk_averse":
        sh = np.sinh(s)
        return Curve(lambda t: np.sinh(s * t) / sh, lambda t: s * np.cosh(s * t) / sh, f"risk_averse(sigma={s:g})")
    d = np.expm1(-s)
    return Curve(lambda t: np.expm1(-s * t) / d, lambda t: -s * np.exp(-s * t) / d, f"eager(sigma={s:g})")


def best_response_risk_neutral(kappa: float, lam: float) -> Curve:
    """Best response of the unit trader to ``lam * t``: ``(1 + λκ/4) t - (λκ/4) t^2``."""
    c = check_lam(lam) * check_kappa(kappa) / 4.0
    return Curve(lambda t: (1.0 + c) * t - c * t * t, lambda t: (1.0 + c) - 2.0 * c * t, "best_response_risk_neutral")


def q_sigma(t, sigma: float, kappa: float):
    """``sinh(σt)/sinh σ + (κ/σ) cosh(σt)/sinh σ``."""
    s = check_sigma(sigma)
    k = float(kappa)
    t = np.asarray(t, dtype=float)
    out = (np.sinh(s * t) + (k / s) * np.cosh(s * t)) / np.sinh(s)
    return float(out) if out.ndim == 0 else out


def _q_sigma_rate(t, s: float, k: float):
    return (s * np.cosh(s * t) + k * np.sinh(s * t)) / np.sinh(s)


def best_response_risk_averse(kappa: float, lam: float, sigma: float) -> Curve:
    """Best response of the unit trader to a λ-scaled risk-averse opponent."""
    k, lam, s = check_kappa(kappa), check_lam(lam), check_sigma(sigma)
    q0, q1 = q_sigma(0.0, s, k), q_sigma(1.0, s, k)
    slope = 1.0 + 0.5 * lam * (q1 - q0)
    curve = Curve(
        lambda t: 0.5 * lam * (q0 - q_sigma(t, s, k)) + slope * t,
        lambda t: -0.5 * lam * _q_sigma_rate(t, s, k) + slope,
        f"best_response_risk_averse(sigma={s:g})",
    )
    return _check_endpoints(curve)


def best_response_eager(kappa: float, lam: float, sigma: float) -> Curve:
    """Best response of the unit trader to a λ-scaled eager opponent.

    Solves ``a'' = -(λ/2)(b'' + κ b')`` for the eager ``b`` with ``a(0)=0``,
    ``a(1)=1``; algebraically identical to the expanded rational-exponential
    expression usually quoted for it.
    """
    k, lam, s = check_kappa(kappa), check_lam(lam), check_sigma(sigma)
    amp = lam * (s - k) / (2.0 * s * -np.expm1(-s))
    slope = 1.0 + lam * (s - k) / (2.0 * s)
    curve = Curve(
        lambda t: amp * np.expm1(-s * t) + slope * t,
        lambda t: -amp * s * np.exp(-s * t) + slope,
        f"best_response_eager(sigma={s:g})",
    )
    return _check_endpoints(curve)


def best_response_to_passive(spec: PassiveSpec | str, kappa: float, lam: float, sigma: float | None = None) -> Curve:
    if isinstance(spec, str):
        spec = PassiveSpec(spec, sigma)
    if spec.kind == "risk_neutral":
        return best_response_risk_neutral(kappa, lam)
    if spec.kind == "risk_averse":
        return best_response_risk_averse(kappa, lam, spec.sigma)
    return best_response_eager(kappa, lam, spec.sigma)


def equilibrium_pair(kappa: float, lam: float) -> tuple[Curve, Curve]:
    """Two-trader equilibrium ``(a_eq, b_eq)``, both as unit strategies.

    ``kappa = 0`` returns the removable-singularity limit ``(t, t)``.
    """
    k, lam = check_kappa(kappa), check_lam(lam)
    if k == 0.0:
        return risk_neutral(), risk_neutral()
    r = k / 3.0
    big = np.exp(r) * (np.exp(r) + np.exp(2.0 * r) + 1.0) * (lam + 1.0)
    denom = 2.0 * np.expm1(k)

    def u(t):
        return -np.expm1(-r * t)

    def du(t):
        return r * np.exp(-r * t)

    def tail(t):
        return (lam - 1.0) * (np.exp(r * t) + np.exp(2.0 * r * t) + np.exp(3.0 * r * t))

    def dtail(t):
        return (lam - 1.0) * r * (np.exp(r * t) + 2.0 * np.exp(2.0 * r * t) + 3.0 * np.exp(3.0 * r * t))

    a_eq = Curve(
        lambda t: -u(t) * (tail(t) - big) / denom,
        lambda t: -(du(t) * (tail(t) - big) + u(t) * dtail(t)) / denom,
        f"a_eq(kappa={k:g}, lam={lam:g})",
    )
    b_eq = Curve(
        lambda t: u(t) * (tail(t) + big) / (denom * lam),
        lambda t: (du(t) * (tail(t) + big) + u(t) * dtail(t)) / (denom * lam),
        f"b_eq(kappa={k:g}, lam={lam:g})",
    )
    return a_eq, b_eq
