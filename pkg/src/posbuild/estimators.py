"""scikit-learn style front ends for the functional API.

Hyper-parameters go to ``__init__`` and are exposed through
``get_params``/``set_params``; ``fit`` does the work and stores results in
trailing-underscore attributes. Curves are evaluated with ``predict(t)``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_n_terms, check_times
from .constraints import compile_constraints
from .cost import _perspective, assemble_cost
from .equilibrium import DEFAULT_TOLERANCE, EquilibriumParams, best_response_step, run
from .qp import QpSettings
from .strategy import StrategyCoeffs, fit_from_function, reconstruct


def _as_coeffs(opponent, n_terms: int) -> np.ndarray:
    if isinstance(opponent, StrategyCoeffs):
        return opponent.coeffs
    if callable(opponent):
        return fit_from_function(opponent, n_terms).coeffs
    return np.asarray(opponent, dtype=float)


class SineCoefficients(BaseEstimator, TransformerMixin):
    """Map unit-strategy callables to rows of sine coefficients.

    ``inverse_transform`` reconstructs the curves on ``t_grid``.
    """

    def __init__(self, n_terms=20, t_grid=None):
        self.n_terms = n_terms
        self.t_grid = t_grid

    def fit(self, X=None, y=None):
        check_n_terms(self.n_terms)
        self.n_features_out_ = self.n_terms
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_out_")
        curves = [X] if callable(X) else list(X)
        return np.vstack([fit_from_function(f, self.n_terms).coeffs for f in curves])

    def inverse_transform(self, X):
        check_is_fitted(self, "n_features_out_")
        t = np.linspace(0.0, 1.0, 201) if self.t_grid is None else check_times(self.t_grid)[0]
        rows = np.atleast_2d(np.asarray(X, dtype=float))
        return np.vstack([reconstruct(r, t) for r in rows])


class BestResponse(BaseEstimator):
    """Constrained best response of one trader to a fixed opponent.

    ``fit(opponent)`` accepts opponent coefficients, a :class:`StrategyCoeffs`
    or a unit-strategy callable (projected onto ``n_terms`` sine modes).
    """

    def __init__(self, kappa=1.0, lam=1.0, n_terms=20, perspective="A", constraints=(), kkt_tolerance=1e-8):
        self.kappa = kappa
        self.lam = lam
        self.n_terms = n_terms
        self.perspective = perspective
        self.constraints = constraints
        self.kkt_tolerance = kkt_tolerance

    def _params(self) -> EquilibriumParams:
        own = _perspective(self.perspective).value
        specs = tuple(self.constraints or ())
        return EquilibriumParams(
            self.kappa, self.lam, self.n_terms, gamma=1.0,
            constraints_a=specs if own == "A" else (),
            constraints_b=specs if own == "B" else (),
            qp_settings=QpSettings(kkt_tolerance=self.kkt_tolerance),
        )

    def fit(self, X, y=None):
        params = self._params()
        opp = _as_coeffs(X, params.n_terms)
        x, report = best_response_step(self.perspective, opp, params)
        qc = assemble_cost(self.perspective, opp, params.kappa, params.lam)
        self.coef_ = x
        self.report_ = report
        self.cost_ = qc.evaluate(x)
        self.opponent_ = opp
        return self

    def predict(self, t):
        check_is_fitted(self, "coef_")
        return reconstruct(self.coef_, t)

    def score(self, X=None, y=None):
        """Negative trading cost of the fitted response (higher is better)."""
        check_is_fitted(self, "coef_")
        return -self.cost_

    def constraint_violation(self) -> float:
        """Largest sampled constraint violation of the fitted response."""
        check_is_fitted(self, "coef_")
        system = compile_constraints(tuple(self.constraints or ()), self.n_terms)
        return float(np.max(system.violation(self.coef_), initial=0.0))


class TwoTraderEquilibrium(BaseEstimator):
    """Equilibrium pair by relaxed alternating best responses.

    After ``fit()``: ``a_``/``b_`` (coefficient vectors), ``trace_``,
    ``status_``, ``n_iter_`` and ``costs_``. ``predict(t)`` returns an array
    with columns ``a(t)`` and ``b(t)``.
    """

    def __init__(self, kappa=1.0, lam=1.0, n_terms=20, gamma=0.8, tolerance=DEFAULT_TOLERANCE,
                 max_iterations=100, constraints_a=(), constraints_b=(), initial_b=None, kkt_tolerance=1e-8):
        self.kappa = kappa
        self.lam = lam
        self.n_terms = n_terms
        self.gamma = gamma
        self.tolerance = tolerance
        self.max_iterations = max_iterations
        self.constraints_a = constraints_a
        self.constraints_b = constraints_b
        self.initial_b = initial_b
        self.kkt_tolerance = kkt_tolerance

    def fit(self, X=None, y=None):
        init_b = None if self.initial_b is None else StrategyCoeffs(_as_coeffs(self.initial_b, self.n_terms))
        params = EquilibriumParams(
            self.kappa, self.lam, self.n_terms, self.gamma, self.tolerance, self.max_iterations,
            tuple(self.constraints_a or ()), tuple(self.constraints_b or ()), init_b,
            qp_settings=QpSettings(kkt_tolerance=self.kkt_tolerance),
        )
        a, b, trace = run(params)
        self.a_ = a.coeffs
        self.b_ = b.coeffs
        self.trace_ = trace
        self.status_ = trace.status.value
        self.n_iter_ = trace.iterations
        self.costs_ = trace.final_costs
        return self

    @property
    def converged_(self) -> bool:
        check_is_fitted(self, "a_")
        return self.status_ == "converged"

    def predict(self, t):
        check_is_fitted(self, "a_")
        return np.column_stack([np.atleast_1d(reconstruct(self.a_, t)), np.atleast_1d(reconstruct(self.b_, t))])
