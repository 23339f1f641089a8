"""Exception hierarchy shared by every module of the package."""


class PosbuildError(Exception):
    """Base class for all package errors."""


class DomainError(PosbuildError, ValueError):
    """An argument lies outside the domain where an operation is defined."""


class ShapeError(PosbuildError, ValueError):
    """Coefficient vectors, matrices or strategies have incompatible sizes."""


class PreconditionError(PosbuildError, ValueError):
    """Input violates a documented precondition (e.g. boundary values)."""


class NumericError(PosbuildError, ArithmeticError):
    """Quadrature failed to converge or an integrand produced non-finite values."""


class InfeasibleSpecError(PosbuildError, ValueError):
    """A constraint specification is infeasible on its own grid."""


class ConsistencyError(PosbuildError, RuntimeError):
    """A closed form failed an internal self-check."""


class SolverError(PosbuildError, RuntimeError):
    """A best-response QP did not terminate with an optimal solution.

    Attributes
    ----------
    report : SolverReport or None
        The failing solver report.
    step : str or None
        Which step failed, e.g. ``"k=3(ii)"``.
    trace : EquilibriumTrace or None
        Partial equilibrium trace when raised from an equilibrium run.
    """

    def __init__(self, message, report=None, step=None, trace=None):
        super().__init__(message)
        self.report = report
        self.step = step
        self.trace = trace
