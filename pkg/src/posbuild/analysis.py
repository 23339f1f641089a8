"""Accuracy metrics against the closed-form equilibrium and state-space series."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from ._validation import check_kappa, check_lam
from .closed_forms import equilibrium_pair
from .cost import strategy_costs
from .equilibrium import EquilibriumTrace
from .strategy import StrategyCoeffs, l2_distance_quad

PHASE_INIT = "init"
PHASE_I = "i"
PHASE_II = "ii"


@dataclass(frozen=True)
class ComparisonReport:
    """Distances to the closed-form equilibrium and the cost endpoints of a run."""

    l2_a: float
    l2_b: float
    cost_a_init: float
    cost_b_init: float
    cost_a_final: float
    cost_b_final: float
    iterations: int
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def _coeffs(s) -> StrategyCoeffs:
    return s if isinstance(s, StrategyCoeffs) else StrategyCoeffs(np.asarray(s, dtype=float))


def compare_to_closed_form(a, b, kappa: float, lam: float, trace: EquilibriumTrace | None = None,
                           *, abs_tol: float = 1e-12) -> ComparisonReport:
    """L2 distances of the reconstructed ``a``, ``b`` to the closed-form pair.

    Distances are integrated on the curves themselves, so they stay
    meaningful against closed forms that are not finite sine sums. Without a
    trace, the initial costs are those of the risk-neutral pair and
    ``iterations`` is 0.
    """
    kappa, lam = check_kappa(kappa), check_lam(lam)
    a, b = _coeffs(a), _coeffs(b)
    a_eq, b_eq = equilibrium_pair(kappa, lam)
    l2_a = l2_distance_quad(a, a_eq, abs_tol=abs_tol)
    l2_b = l2_distance_quad(b, b_eq, abs_tol=abs_tol)
    final = strategy_costs(a.coeffs, b.coeffs, kappa, lam)
    if trace is not None:
        init = (trace.init_cost_a, trace.init_cost_b)
        iterations = trace.iterations
    else:
        zero = np.zeros(a.n_terms)
        init = strategy_costs(zero, zero, kappa, lam)
        iterations = 0
    params = {"kappa": kappa, "lambda": lam, "n_terms": a.n_terms}
    if trace is not None:
        params.update(gamma=trace.params.gamma, tolerance=trace.params.tolerance)
    return ComparisonReport(l2_a, l2_b, init[0], init[1], final[0], final[1], iterations, params)


def state_space_series(trace: EquilibriumTrace | None) -> list[tuple[str, int, float, float]]:
    """``(phase, iteration, cost_a, cost_b)`` points of the path to equilibrium.

    The initial point comes first, then for each iteration the pair after
    step (i) and the pair after step (ii). A trace without iterations
    yields an empty list.
    """
    if trace is None or not trace.records:
        return []
    out = [(PHASE_INIT, 0, trace.init_cost_a, trace.init_cost_b)]
    for rec in trace.records:
        out.append((PHASE_I, rec.k, rec.cost_a_i, rec.cost_b_i))
        out.append((PHASE_II, rec.k, rec.cost_a, rec.cost_b))
    return out
