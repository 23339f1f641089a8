"""Compile path and trading-rate constraints into ``G x <= h`` over sine coefficients.

Continuous constraints such as ``a(t) <= c(t)`` for all ``t`` are sampled on
a uniform grid strictly inside (0, 1); the boundary values are already
fixed by the sine representation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

import numpy as np

from ._validation import check_n_terms, check_real
from .exceptions import DomainError, InfeasibleSpecError
from .strategy import dsine_basis, sine_basis

DEFAULT_GRID_POINTS = 200

# canonical kind -> accepted aliases
KINDS = {
    "path_upper": ("upper_path",),
    "path_lower": ("lower_path",),
    "channel": (),
    "overbuy": (),
    "end_strategy": (),
    "short_sell": ("short_sell_floor",),
    "no_sell": (),
}
_ALIASES = {alias: kind for kind, aliases in KINDS.items() for alias in (kind, *aliases)}


@dataclass(frozen=True)
class TimeGrid:
    """Uniform sample times strictly inside (0, 1)."""

    points: np.ndarray
    k: int
    t_start: float
    t_end: float

    def __len__(self):
        return self.points.size


def make_grid(k: int = DEFAULT_GRID_POINTS, t_start: float = 0.0, t_end: float = 1.0) -> TimeGrid:
    """``k`` uniform points on ``[max(t_start, δ), min(t_end, 1 - δ)]``, ``δ = 1/(2(k+1))``.

    A single point is placed at the midpoint of the clamped interval.
    """
    k = check_n_terms(k, "k")
    t_start = check_real(t_start, "t_start", low=0.0, high=1.0)
    t_end = check_real(t_end, "t_end", low=0.0, high=1.0)
    if not t_start < t_end:
        raise DomainError(f"need t_start < t_end, got [{t_start}, {t_end}]")
    delta = 1.0 / (2.0 * (k + 1))
    lo, hi = max(t_start, delta), min(t_end, 1.0 - delta)
    if lo > hi:
        raise DomainError(f"interval [{t_start}, {t_end}] is empty after clamping by {delta:.3g}")
    pts = np.array([0.5 * (lo + hi)]) if k == 1 else np.linspace(lo, hi, k)
    pts.setflags(write=False)
    return TimeGrid(pts, k, t_start, t_end)


def _eval_bound(bound: "Callable[[np.ndarray], np.ndarray] | float", t: np.ndarray) -> np.ndarray:
    values = bound(t) if callable(bound) else bound
    return np.broadcast_to(np.asarray(values, dtype=float), t.shape).astype(float)


@dataclass(frozen=True)
class ConstraintSpec:
    """One constraint family on a trader's unit strategy.

    ``params`` by kind: ``path_upper``/``path_lower``: ``bound``;
    ``channel``: ``lower``, ``upper``; ``overbuy``: ``rho``;
    ``end_strategy``: ``t_star``, ``c``; ``short_sell``: ``floor`` (default 0);
    ``no_sell``: none. Bounds are floats or callables of time.
    """

    kind: str
    params: Mapping[str, Any] = field(default_factory=dict)
    grid: TimeGrid | None = None

    def __post_init__(self):
        kind = _ALIASES.get(self.kind)
        if kind is None:
            raise DomainError(f"unknown constraint kind {self.kind!r}; expected one of {sorted(KINDS)}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "params", dict(self.params))
        p = self.params
        if kind == "end_strategy":
            t_star = check_real(p.get("t_star"), "t_star", low=0.0, high=1.0, low_open=True, high_open=True)
            if check_real(p.get("c"), "c") >= 1.0:
                raise DomainError("end_strategy requires c < 1")
            if self.grid is None:
                object.__setattr__(self, "grid", make_grid(DEFAULT_GRID_POINTS, t_star, 1.0))
        elif kind == "overbuy":
            check_real(p.get("rho"), "rho", low=0.0)
        elif kind == "short_sell":
            if check_real(p.get("floor", 0.0), "floor") > 0.0:
                raise DomainError("short_sell floor must be <= 0")
        elif kind in ("path_upper", "path_lower"):
            if "bound" not in p:
                raise DomainError(f"{kind} requires a 'bound'")
        elif kind == "channel":
            if "lower" not in p or "upper" not in p:
                raise DomainError("channel requires 'lower' and 'upper'")
        if self.grid is None:
            object.__setattr__(self, "grid", make_grid())


@dataclass(frozen=True)
class ConstraintSystem:
    """Linear inequalities ``G x <= h``; ``row_labels[i] = (kind, time)``."""

    G: np.ndarray
    h: np.ndarray
    row_labels: tuple[tuple[str, float], ...]

    @property
    def n_rows(self) -> int:
        return self.h.size

    @property
    def n_terms(self) -> int:
        return self.G.shape[1]

    @classmethod
    def empty(cls, n_terms: int) -> "ConstraintSystem":
        return cls(np.zeros((0, n_terms)), np.zeros(0), ())

    def violation(self, x) -> np.ndarray:
        """Per-row ``G x - h`` (positive entries are violations)."""
        return self.G @ np.asarray(x, dtype=float) - self.h


def _upper(t, bound, n_terms):
    # a(t) <= c(t)  <=>  sum a_n sin(n pi t) <= c(t) - t
    return sine_basis(t, n_terms), _eval_bound(bound, t) - t


def _lower(t, bound, n_terms):
    return -sine_basis(t, n_terms), t - _eval_bound(bound, t)


def _rows(spec: ConstraintSpec, n_terms: int):
    t = spec.grid.points
    p = spec.params
    kind = spec.kind
    if kind == "path_upper":
        yield kind, t, *_upper(t, p["bound"], n_terms)
    elif kind == "path_lower":
        yield kind, t, *_lower(t, p["bound"], n_terms)
    elif kind == "overbuy":
        yield kind, t, *_upper(t, 1.0 + float(p["rho"]), n_terms)
    elif kind == "short_sell":
        yield kind, t, *_lower(t, float(p.get("floor", 0.0)), n_terms)
    elif kind == "channel":
        lo, hi = _eval_bound(p["lower"], t), _eval_bound(p["upper"], t)
        bad = np.flatnonzero(lo > hi)
        if bad.size:
            raise InfeasibleSpecError(f"channel lower bound exceeds upper bound at t={t[bad[0]]:.6g}")
        yield "channel_lower", t, *_lower(t, lo, n_terms)
        yield "channel_upper", t, *_upper(t, hi, n_terms)
    elif kind == "end_strategy":
        yield "end_strategy_lower", t, *_lower(t, float(p["c"]), n_terms)
        yield "end_strategy_upper", t, *_upper(t, 1.0, n_terms)
    elif kind == "no_sell":
        # a'(t) >= 0  <=>  -sum a_n n pi cos(n pi t) <= 1
        yield kind, t, -dsine_basis(t, n_terms), np.ones_like(t)


def compile_constraints(specs, n_terms: int) -> ConstraintSystem:
    """Stack every sampled inequality of ``specs`` into one system."""
    n_terms = check_n_terms(n_terms)
    blocks_g, blocks_h, labels = [], [], []
    for spec in specs or ():
        for label, t, g, h in _rows(spec, n_terms):
            blocks_g.append(g)
            blocks_h.append(h)
            labels.extend((label, float(s)) for s in t)
    if not blocks_g:
        return ConstraintSystem.empty(n_terms)
    G, h = np.vstack(blocks_g), np.concatenate(blocks_h)
    if not (np.all(np.isfinite(G)) and np.all(np.isfinite(h))):
        raise DomainError("constraint bounds produced non-finite values")
    G.setflags(write=False)
    h.setflags(write=False)
    return ConstraintSystem(G, h, tuple(labels))

