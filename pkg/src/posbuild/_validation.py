"""Small input validation helpers used across the package."""

from __future__ import annotations

import math
from numbers import Integral, Real

import numpy as np

from .exceptions import DomainError, ShapeError


def check_real(value, name: str, *, low=None, high=None, low_open=False, high_open=False) -> float:
    """Return ``value`` as a finite float, checking optional bounds."""
    if isinstance(value, bool) or not isinstance(value, (Real, np.floating, np.integer)):
        raise DomainError(f"{name} must be a real number, got {value!r}")
    x = float(value)
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x}")
    if low is not None and (x < low or (low_open and x == low)):
        op = ">" if low_open else ">="
        raise DomainError(f"{name} must be {op} {low}, got {x}")
    if high is not None and (x > high or (high_open and x == high)):
        op = "<" if high_open else "<="
        raise DomainError(f"{name} must be {op} {high}, got {x}")
    return x


def check_kappa(kappa) -> float:
    return check_real(kappa, "kappa", low=0.0)


def check_lam(lam) -> float:
    return check_real(lam, "lam", low=0.0, low_open=True)


def check_sigma(sigma) -> float:
    return check_real(sigma, "sigma", low=0.0, low_open=True)


def check_gamma(gamma) -> float:
    return check_real(gamma, "gamma", low=0.0, high=1.0, low_open=True)


def check_n_terms(n, name: str = "n_terms") -> int:
    if isinstance(n, bool) or not isinstance(n, (Integral, np.integer)) or n < 1:
        raise DomainError(f"{name} must be a positive integer, got {n!r}")
    return int(n)


def check_times(t, *, name: str = "t"):
    """Validate times in [0, 1]; returns ``(array, was_scalar)``."""
    arr = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
        raise DomainError(f"{name} must lie in [0, 1]")
    return arr, arr.ndim == 0


def check_vector(x, n: int | None = None, name: str = "x") -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise ShapeError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise ShapeError(f"{name} must have length {n}, got {arr.shape[0]}")
    return arr
