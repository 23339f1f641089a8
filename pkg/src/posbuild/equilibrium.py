"""Two-trader equilibrium by alternating, relaxed best responses.

Starting from ``a^(0) = 0`` (risk-neutral, unless overridden) and an initial ``b^(0)``, each
iteration ``k`` performs

    (i)  a^(k) = γ BR_A(b^(k-1)) + (1 - γ) a^(k-1)
    (ii) b^(k) = γ BR_B(a^(k))   + (1 - γ) b^(k-1)

where each best response is a constrained QP over sine coefficients.
Relaxing in coefficient space is the same as relaxing the curves, because
the coefficient map is affine.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_gamma, check_kappa, check_lam, check_n_terms, check_real, check_vector
from .constraints import ConstraintSpec, compile_constraints
from .cost import Perspective, _perspective, assemble_cost_a, assemble_cost_b, evaluate
from .exceptions import DomainError, SolverError
from .qp import QpSettings, SolverReport, solve
from .strategy import StrategyCoeffs

logger = logging.getLogger(__name__)

DIVERGENCE_CEILING = 1e3
DEFAULT_TOLERANCE = 1e-5


class RunStatus(str, enum.Enum):
    CONVERGED = "converged"
    DIVERGED = "diverged"
    MAX_ITERATIONS = "max_iterations"


@dataclass(frozen=True)
class EquilibriumParams:
    kappa: float
    lam: float
    n_terms: int
    gamma: float = 0.8
    tolerance: float = DEFAULT_TOLERANCE
    max_iterations: int = 100
    constraints_a: tuple[ConstraintSpec, ...] = ()
    constraints_b: tuple[ConstraintSpec, ...] = ()
    initial_b: StrategyCoeffs | None = None
    initial_a: StrategyCoeffs | None = None
    qp_settings: QpSettings = field(default_factory=QpSettings)

    def __post_init__(self):
        object.__setattr__(self, "kappa", check_kappa(self.kappa))
        object.__setattr__(self, "lam", check_lam(self.lam))
        object.__setattr__(self, "n_terms", check_n_terms(self.n_terms))
        object.__setattr__(self, "gamma", check_gamma(self.gamma))
        object.__setattr__(self, "tolerance", check_real(self.tolerance, "tolerance", low=0.0, low_open=True))
        object.__setattr__(self, "max_iterations", check_n_terms(self.max_iterations, "max_iterations"))
        object.__setattr__(self, "constraints_a", tuple(self.constraints_a))
        object.__setattr__(self, "constraints_b", tuple(self.constraints_b))
        for name in ("initial_a", "initial_b"):
            start = getattr(self, name)
            if start is None:
                continue
            if not isinstance(start, StrategyCoeffs):
                start = StrategyCoeffs(np.asarray(start, dtype=float))
                object.__setattr__(self, name, start)
            if start.n_terms != self.n_terms:
                raise DomainError(f"{name} has {start.n_terms} terms, expected {self.n_terms}")

    def a0(self) -> np.ndarray:
        return np.zeros(self.n_terms) if self.initial_a is None else self.initial_a.coeffs.copy()

    def b0(self) -> np.ndarray:
        return np.zeros(self.n_terms) if self.initial_b is None else self.initial_b.coeffs.copy()


@dataclass(frozen=True)
class IterationRecord:
    """Iterates and costs of one full iteration.

    ``cost_*_i`` are both costs at ``(a^(k), b^(k-1))`` after step (i);
    ``cost_*`` are the costs at ``(a^(k), b^(k))`` after step (ii).
    """

    k: int
    a: np.ndarray
    b: np.ndarray
    cost_a_i: float
    cost_b_i: float
    cost_a: float
    cost_b: float
    delta_a: float
    delta_b: float
    report_a: SolverReport
    report_b: SolverReport


@dataclass
class EquilibriumTrace:
    params: EquilibriumParams
    init_a: np.ndarray
    init_b: np.ndarray
    init_cost_a: float
    init_cost_b: float
    records: list[IterationRecord] = field(default_factory=list)
    status: RunStatus | None = None

    def __len__(self):
        return len(self.records)

    @property
    def iterations(self) -> int:
        return len(self.records)

    @property
    def final_costs(self) -> tuple[float, float]:
        if not self.records:
            return self.init_cost_a, self.init_cost_b
        last = self.records[-1]
        return last.cost_a, last.cost_b


class _Systems:
    """Constraint systems compiled once per run."""

    def __init__(self, params: EquilibriumParams):
        self.a = compile_constraints(params.constraints_a, params.n_terms)
        self.b = compile_constraints(params.constraints_b, params.n_terms)


def _costs(a: np.ndarray, b: np.ndarray, params: EquilibriumParams) -> tuple[float, float]:
    ca = evaluate(assemble_cost_a(b, params.kappa, params.lam), a)
    cb = evaluate(assemble_cost_b(a, params.kappa, params.lam), b)
    return ca, cb


def best_response_step(own, opponent_coeffs, params: EquilibriumParams, *, system=None, warm_start=None, step=None):
    """Unrelaxed constrained best response of trader ``own`` to fixed opponent coefficients.

    Returns ``(x, report)``; raises :class:`SolverError` if the QP is not solved.
    """
    p = _perspective(own)
    opp = opponent_coeffs.coeffs if isinstance(opponent_coeffs, StrategyCoeffs) else opponent_coeffs
    opp = check_vector(opp, params.n_terms, name="opponent_coeffs")
    if p is Perspective.A:
        qc = assemble_cost_a(opp, params.kappa, params.lam)
        specs = params.constraints_a
    else:
        qc = assemble_cost_b(opp, params.kappa, params.lam)
        specs = params.constraints_b
    if system is None:
        system = compile_constraints(specs, params.n_terms)
    settings = params.qp_settings
    if warm_start is not None:
        settings = QpSettings(settings.kkt_tolerance, settings.max_iterations, np.asarray(warm_start, dtype=float))
    x, report = solve(qc, system, settings)
    if not report.ok:
        label = step or p.value
        raise SolverError(f"best response for {p.value} failed at step {label}: {report.status.value}", report, label)
    return x, report


def run(params: EquilibriumParams) -> tuple[StrategyCoeffs, StrategyCoeffs, EquilibriumTrace]:
    """Iterate relaxed best responses until the coefficients stop moving.

    Converged when ``max(||Δa||inf, ||Δb||inf) < tolerance`` over a full
    iteration; diverged when a coefficient exceeds the divergence ceiling in
    magnitude or a cost becomes non-finite. QP failures raise
    :class:`SolverError` carrying the partial trace.
    """
    systems = _Systems(params)
    g = params.gamma
    a = params.a0()
    b = params.b0()
    ca0, cb0 = _costs(a, b, params)
    trace = EquilibriumTrace(params, a.copy(), b.copy(), ca0, cb0)
    resp_a = resp_b = None
    status = RunStatus.MAX_ITERATIONS
    for k in range(1, params.max_iterations + 1):
        try:
            resp_a, rep_a = best_response_step("A", b, params, system=systems.a, warm_start=resp_a, step=f"k={k}(i)")
            a_new = g * resp_a + (1.0 - g) * a
            ca_i, cb_i = _costs(a_new, b, params)
            resp_b, rep_b = best_response_step("B", a_new, params, system=systems.b, warm_start=resp_b, step=f"k={k}(ii)")
        except SolverError as exc:
            trace.status = None
            exc.trace = trace
            raise
        b_new = g * resp_b + (1.0 - g) * b
        ca, cb = _costs(a_new, b_new, params)
        da, db = float(np.max(np.abs(a_new - a))), float(np.max(np.abs(b_new - b)))
        trace.records.append(IterationRecord(k, a_new, b_new, ca_i, cb_i, ca, cb, da, db, rep_a, rep_b))
        a, b = a_new, b_new
        logger.debug("iteration %d: delta=(%.3g, %.3g) costs=(%.6g, %.6g)", k, da, db, ca, cb)
        blown = max(np.max(np.abs(a)), np.max(np.abs(b))) > DIVERGENCE_CEILING
        if blown or not (np.isfinite(ca) and np.isfinite(cb)):
            status = RunStatus.DIVERGED
            break
        if max(da, db) < params.tolerance:
            status = RunStatus.CONVERGED
            break
    trace.status = status
    return StrategyCoeffs(a), StrategyCoeffs(b, params.lam), trace


def fixed_point_residual(a, b, params: EquilibriumParams) -> float:
    """``max(||a - BR_A(b)||inf, ||b - BR_B(a)||inf)``; zero at an equilibrium."""
    a = a.coeffs if isinstance(a, StrategyCoeffs) else check_vector(a, params.n_terms, name="a")
    b = b.coeffs if isinstance(b, StrategyCoeffs) else check_vector(b, params.n_terms, name="b")
    br_a, _ = best_response_step("A", b, params)
    br_b, _ = best_response_step("B", a, params)
    return float(max(np.max(np.abs(a - br_a)), np.max(np.abs(b - br_b))))
