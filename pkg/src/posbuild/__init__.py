"""Constrained best responses and two-trader equilibria for position building.

Strategies are unit curves ``a(t) = t + sum a_n sin(n pi t)`` on [0, 1].
Each trader's cost against a fixed opponent is a quadratic in its own sine
coefficients, so best responses under sampled linear constraints are small
dense QPs, and equilibria follow from relaxed alternating best responses.
"""

from .analysis import ComparisonReport, compare_to_closed_form, state_space_series
from .closed_forms import (
    Curve,
    PassiveSpec,
    best_response_eager,
    best_response_risk_averse,
    best_response_risk_neutral,
    best_response_to_passive,
    equilibrium_pair,
    passive,
    q_sigma,
    risk_neutral,
)
from .constraints import ConstraintSpec, ConstraintSystem, TimeGrid, compile_constraints, make_grid
from .cost import (
    Perspective,
    QuadraticCost,
    TrigTable,
    assemble_cost,
    assemble_cost_a,
    assemble_cost_b,
    cross_sum,
    cross_weights,
    evaluate,
    gradient,
    quadrature_cost,
    strategy_costs,
    trig_integral,
)
from .equilibrium import (
    EquilibriumParams,
    EquilibriumTrace,
    IterationRecord,
    RunStatus,
    best_response_step,
    fixed_point_residual,
    run,
)
from .estimators import BestResponse, SineCoefficients, TwoTraderEquilibrium
from .exceptions import (
    ConsistencyError,
    DomainError,
    InfeasibleSpecError,
    NumericError,
    PosbuildError,
    PreconditionError,
    ShapeError,
    SolverError,
)
from .qp import QpSettings, SolverReport, Status, kkt_residuals, solve
from .strategy import (
    StrategyCoeffs,
    convex_combine,
    derivative_at,
    fit_from_function,
    l2_distance,
    l2_distance_quad,
    reconstruct,
    sine_basis,
)

__version__ = "0.1.0"

__all__ = [
    "BestResponse",
    "ComparisonReport",
    "ConsistencyError",
    "ConstraintSpec",
    "ConstraintSystem",
    "Curve",
    "DomainError",
    "EquilibriumParams",
    "EquilibriumTrace",
    "InfeasibleSpecError",
    "IterationRecord",
    "NumericError",
    "PassiveSpec",
    "Perspective",
    "PosbuildError",
    "PreconditionError",
    "QpSettings",
    "QuadraticCost",
    "RunStatus",
    "ShapeError",
    "SineCoefficients",
    "SolverError",
    "SolverReport",
    "Status",
    "StrategyCoeffs",
    "TimeGrid",
    "TrigTable",
    "TwoTraderEquilibrium",
    "assemble_cost",
    "assemble_cost_a",
    "assemble_cost_b",
    "best_response_eager",
    "best_response_risk_averse",
    "best_response_risk_neutral",
    "best_response_step",
    "best_response_to_passive",
    "compare_to_closed_form",
    "compile_constraints",
    "convex_combine",
    "cross_sum",
    "cross_weights",
    "derivative_at",
    "equilibrium_pair",
    "evaluate",
    "fit_from_function",
    "fixed_point_residual",
    "gradient",
    "kkt_residuals",
    "l2_distance",
    "l2_distance_quad",
    "make_grid",
    "passive",
    "q_sigma",
    "quadrature_cost",
    "reconstruct",
    "risk_neutral",
    "run",
    "sine_basis",
    "solve",
    "state_space_series",
    "strategy_costs",
    "trig_integral",
]
