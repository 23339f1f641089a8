"""Composite Simpson quadrature on [0, 1] with a Richardson error check."""

from __future__ import annotations

import numpy as np
from scipy.integrate import simpson

from .exceptions import NumericError

MAX_POINTS = 2**19 + 1


def integrate_unit(fn, *, n_points: int = 2001, abs_tol: float = 1e-10, max_points: int = MAX_POINTS):
    """Integrate ``fn`` over [0, 1].

    ``fn`` receives a 1-d array of times and returns values whose last axis
    matches it, so several integrands can be handled in one call. The grid
    is doubled until the Richardson estimate of every component is below
    ``abs_tol``; the extrapolated value is returned.
    """
    if n_points < 3 or n_points % 2 == 0:
        raise ValueError("n_points must be odd and >= 3")
    t = np.linspace(0.0, 1.0, n_points)
    coarse = _simpson(fn, t)
    while True:
        n_fine = 2 * (t.size - 1) + 1
        if n_fine > max_points:
            raise NumericError(f"quadrature did not reach abs_tol={abs_tol:g} with {t.size} points")
        t = np.linspace(0.0, 1.0, n_fine)
        fine = _simpson(fn, t)
        err = np.abs(fine - coarse) / 15.0
        if np.all(err <= abs_tol):
            return fine + (fine - coarse) / 15.0
        coarse = fine


def _simpson(fn, t):
    y = np.asarray(fn(t), dtype=float)
    if not np.all(np.isfinite(y)):
        raise NumericError("integrand produced non-finite values")
    return simpson(y, x=t, axis=-1)


def vectorize_curve(f):
    """Wrap a scalar or array callable so it maps arrays to float arrays."""

    def wrapped(t):
        t = np.asarray(t, dtype=float)
        try:
            y = np.asarray(f(t), dtype=float)
            if y.shape == t.shape:
                return y
        except (TypeError, ValueError):
            pass
        return np.array([float(f(float(s))) for s in t.ravel()]).reshape(t.shape)

    return wrapped
