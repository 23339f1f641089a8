"""Dense strictly convex QP: minimize 1/2 x.Qx + q.x + r subject to G x <= h.

Implements the Goldfarb-Idnani dual active-set method. The iteration starts
from the unconstrained minimizer (always dual feasible), repeatedly adds the
most violated inequality, and drops active constraints whose multipliers
would turn negative. Each iterate is the exact minimizer over its active set,
so termination yields a KKT point to rounding error. Q is factored once
(trivially when diagonal, which is the case for every cost this package
assembles); the active normals are kept in Q^{-1/2}-scaled coordinates and
re-orthogonalized with a QR factorization on every change.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cholesky, qr, solve_triangular

from .constraints import ConstraintSystem
from .cost import QuadraticCost
from .exceptions import ShapeError

DEPENDENCE_TOL = 1e-10


class Status(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    MAX_ITERATIONS = "max_iterations"
    NUMERIC_FAILURE = "numeric_failure"


@dataclass(frozen=True)
class QpSettings:
    kkt_tolerance: float = 1e-8
    max_iterations: int = 10000
    warm_start: np.ndarray | None = None

    def __post_init__(self):
        if not self.kkt_tolerance > 0:
            raise ValueError("kkt_tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass(frozen=True)
class SolverReport:
    status: Status
    iterations: int
    primal_residual: float
    dual_residual: float
    complementarity: float
    objective: float
    multipliers: np.ndarray = field(repr=False)
    active_set: tuple[int, ...] = ()
    certificate: np.ndarray | None = field(default=None, repr=False)

    @property
    def ok(self) -> bool:
        return self.status is Status.OPTIMAL

    def summary(self) -> dict:
        return {
            "status": self.status.value,
            "iterations": self.iterations,
            "primal_residual": self.primal_residual,
            "dual_residual": self.dual_residual,
            "complementarity": self.complementarity,
            "objective": self.objective,
            "n_active": len(self.active_set),
        }


def kkt_residuals(qc: QuadraticCost, cs: ConstraintSystem, x, mu) -> tuple[float, float, float]:
    """``(||max(Gx-h, 0)||inf, ||Qx + q + G^T mu||inf, ||mu * (Gx - h)||inf)``."""
    x = np.asarray(x, dtype=float)
    mu = np.asarray(mu, dtype=float)
    if x.shape != (qc.n_terms,) or cs.G.shape[1] != qc.n_terms or mu.shape != (cs.n_rows,):
        raise ShapeError("inconsistent dimensions between cost, constraints, x and mu")
    slack = cs.G @ x - cs.h
    primal = float(np.max(np.maximum(slack, 0.0), initial=0.0))
    dual = float(np.max(np.abs(qc.quad @ x + qc.linear + cs.G.T @ mu), initial=0.0))
    comp = float(np.max(np.abs(mu * slack), initial=0.0))
    return primal, dual, comp


class _ActiveSet:
    """Orthogonal factorization of the scaled active normals ``J^T G_A^T``."""

    def __init__(self, J: np.ndarray):
        self.J = J
        self.rows: list[int] = []
        self.cols = np.zeros((J.shape[0], 0))
        self._factor()

    def _factor(self):
        if self.cols.shape[1]:
            self.U, self.R = qr(self.cols, mode="economic")
        else:
            self.U = np.zeros((self.J.shape[0], 0))
            self.R = np.zeros((0, 0))

    def add(self, row: int, scaled: np.ndarray):
        self.rows.append(row)
        self.cols = np.column_stack([self.cols, scaled])
        self._factor()

    def drop(self, pos: int):
        del self.rows[pos]
        self.cols = np.delete(self.cols, pos, axis=1)
        self._factor()

    def directions(self, d: np.ndarray):
        """Primal step ``z``, dual step ``r`` and the norm of ``d`` off the active span."""
        proj = self.U.T @ d
        resid = d - self.U @ proj
        z = self.J @ resid
        r = solve_triangular(self.R, proj) if self.rows else np.zeros(0)
        return z, r, float(np.linalg.norm(resid))


def _objective(qc: QuadraticCost, x: np.ndarray) -> float:
    return float(qc.constant + qc.linear @ x + 0.5 * x @ qc.quad @ x)


def _inverse_root(quad: np.ndarray) -> np.ndarray:
    """``J`` with ``J J^T = Q^{-1}``."""
    diag = np.diag(quad)
    if np.count_nonzero(quad - np.diag(diag)) == 0:
        if np.any(diag <= 0):
            raise np.linalg.LinAlgError("Q is not positive definite")
        return np.diag(1.0 / np.sqrt(diag))
    L = cholesky(quad, lower=True)
    return solve_triangular(L, np.eye(quad.shape[0]), lower=True).T


def _unconstrained(qc: QuadraticCost, J: np.ndarray) -> np.ndarray:
    """``-Q^{-1} q``, exact division when ``Q`` is diagonal."""
    if np.count_nonzero(J - np.diag(np.diag(J))) == 0:
        return -qc.linear / np.diag(qc.quad)
    return -J @ (J.T @ qc.linear)


def _warm_active_set(qc, cs, J, x0, tol):
    """Active set implied by ``x0`` restricted to a dual-feasible subset."""
    slack = cs.G @ x0 - cs.h
    candidates = [int(i) for i in np.flatnonzero(np.abs(slack) <= max(tol, 1e-9))]
    active = _ActiveSet(J)
    for i in candidates:
        d = J.T @ (-cs.G[i])
        _, _, off_span = active.directions(d)
        if off_span > DEPENDENCE_TOL * np.linalg.norm(d):
            active.add(i, d)
    while active.rows:
        x, u = _eqp(qc, cs, J, active)
        neg = np.flatnonzero(u < 0)
        if not neg.size:
            return active, x, u
        active.drop(int(neg[np.argmin(u[neg])]))
    return active, _unconstrained(qc, J), np.zeros(0)


def _eqp(qc, cs, J, active):
    """Minimizer over the active constraints as equalities and their multipliers."""
    N = -cs.G[active.rows].T
    b = -cs.h[active.rows]
    x_u = _unconstrained(qc, J)
    # x = x_u + J U R^{-T} (b - N^T x_u); multipliers u = R^{-1} R^{-T} (b - N^T x_u)
    w = solve_triangular(active.R, b - N.T @ x_u, trans="T")
    x = x_u + J @ (active.U @ w)
    u = solve_triangular(active.R, w)
    return x, u


def solve(qc: QuadraticCost, cs: ConstraintSystem, settings: QpSettings | None = None):
    """Solve the QP; returns ``(x, SolverReport)``.

    With no constraint rows the closed form ``x = -Q^{-1} q`` is returned.
    Infeasibility is reported with a Farkas certificate ``y >= 0`` satisfying
    ``G^T y = 0`` and ``h . y < 0``.
    """
    settings = settings or QpSettings()
    n = qc.n_terms
    if cs.G.shape != (cs.n_rows, n):
        raise ShapeError(f"constraint matrix has shape {cs.G.shape}, expected (M, {n})")
    tol = settings.kkt_tolerance
    try:
        J = _inverse_root(qc.quad)
    except np.linalg.LinAlgError:
        x = np.zeros(n)
        return x, _report(qc, cs, x, np.zeros(cs.n_rows), Status.NUMERIC_FAILURE, 0, ())

    if cs.n_rows == 0:
        x = _unconstrained(qc, J)
        return x, _report(qc, cs, x, np.zeros(0), Status.OPTIMAL, 0, ())

    # constraints as n_i . x >= b_i with n_i = -G_i, b_i = -h_i
    Nmat = -cs.G
    bvec = -cs.h
    scale = np.maximum(np.linalg.norm(cs.G, axis=1), 1.0)
    feas_tol = 1e-2 * tol

    if settings.warm_start is not None:
        active, x, u = _warm_active_set(qc, cs, J, np.asarray(settings.warm_start, dtype=float), tol)
        u = list(u)
    else:
        active, x, u = _ActiveSet(J), _unconstrained(qc, J), []

    iterations = 0
    while True:
        slack = Nmat @ x - bvec
        violated = slack < -feas_tol
        violated[active.rows] = False
        if violated.any():
            # most violated in normalized terms; argmin picks the lowest row index on ties
            p = int(np.argmin(np.where(violated, slack / scale, np.inf)))
        else:
            return _finish(qc, cs, J, active, x, u, iterations, tol)

        d = J.T @ Nmat[p]
        u_plus = np.append(np.asarray(u, dtype=float), 0.0)
        while True:
            iterations += 1
            if iterations > settings.max_iterations:
                mu = np.zeros(cs.n_rows)
                mu[active.rows] = u_plus[:-1]
                return x, _report(qc, cs, x, mu, Status.MAX_ITERATIONS, iterations - 1, tuple(active.rows))
            z, r, off_span = active.directions(d)
            # partial step: largest move keeping the active multipliers non-negative
            t1, drop = np.inf, -1
            pos = np.flatnonzero(r > 1e-14)
            if pos.size:
                ratios = u_plus[pos] / r[pos]
                k = int(np.argmin(ratios))
                t1, drop = float(ratios[k]), int(pos[k])
            zn = float(z @ Nmat[p])
            dependent = off_span <= DEPENDENCE_TOL * np.linalg.norm(d) or zn <= 0.0
            t2 = np.inf if dependent else -(Nmat[p] @ x - bvec[p]) / zn
            t = min(t1, t2)
            if not np.isfinite(t):
                cert = np.zeros(cs.n_rows)
                cert[active.rows] = np.maximum(-r, 0.0)
                cert[p] = 1.0
                mu = np.zeros(cs.n_rows)
                mu[active.rows] = u_plus[:-1]
                return x, _report(qc, cs, x, mu, Status.INFEASIBLE, iterations, tuple(active.rows), cert)
            if np.isfinite(t2):
                x = x + t * z
            u_plus[:-1] -= t * r
            u_plus[-1] += t
            if t == t2:
                active.add(p, d)
                u = list(u_plus)
                break
            # drop the blocking constraint and retry the same violated row
            active.drop(drop)
            u_plus = np.delete(u_plus, drop)
            if not np.all(np.isfinite(x)):
                return x, _report(qc, cs, x, np.zeros(cs.n_rows), Status.NUMERIC_FAILURE, iterations, ())


def _finish(qc, cs, J, active, x, u, iterations, tol):
    """Re-solve on the final active set to remove accumulated step error."""
    mu = np.zeros(cs.n_rows)
    if active.rows:
        x_eq, u_eq = _eqp(qc, cs, J, active)
        if np.all(np.isfinite(x_eq)) and np.all(u_eq >= -tol):
            x, u = x_eq, u_eq
        mu[active.rows] = u
    report = _report(qc, cs, x, mu, Status.OPTIMAL, iterations, tuple(active.rows))
    if max(report.primal_residual, report.dual_residual, report.complementarity) > tol:
        report = _report(qc, cs, x, mu, Status.NUMERIC_FAILURE, iterations, tuple(active.rows))
    return x, report


def _report(qc, cs, x, mu, status, iterations, active, certificate=None):
    primal, dual, comp = kkt_residuals(qc, cs, x, mu)
    if status is Status.INFEASIBLE and certificate is not None:
        # certificate residual: ||G^T y||inf relative to the gap h.y
        comp = float(np.max(np.abs(cs.G.T @ certificate), initial=0.0))
    return SolverReport(
        status=status,
        iterations=iterations,
        primal_residual=primal,
        dual_residual=dual,
        complementarity=comp,
        objective=_objective(qc, x),
        multipliers=mu,
        active_set=tuple(active),
        certificate=certificate,
    )
