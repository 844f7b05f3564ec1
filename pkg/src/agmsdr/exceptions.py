"""Exception types shared across the solver stack."""

from __future__ import annotations


class AgmsdrError(Exception):
    """Base class for all library errors."""


class ZeroGradient(AgmsdrError):
    """The (sub)gradient vanished; the current point is stationary.

    Solvers treat this as successful termination, not a failure.
    """


class NoDescent(AgmsdrError):
    """Ray search found no point improving on the start of the ray."""

    def __init__(self, msg: str = "no descent along the ray", value_at_zero: float | None = None):
        super().__init__(msg)
        self.value_at_zero = value_at_zero


class NoDecrease(AgmsdrError):
    """Coefficient equation requires strict descent but f(x+) >= f(y)."""


class AlreadyOptimal(AgmsdrError):
    """Strongly convex coefficient equation is infeasible, which certifies
    the current iterate is already (eps/2-)accurate."""


class DegenerateQuadratic(AgmsdrError):
    """Leading coefficient of the coefficient equation vanished.

    Carries the solution of the remaining linear equation so the caller can
    decide whether to use it or fall back to a fixed-step coefficient.
    """

    def __init__(self, linear_root: float):
        super().__init__(f"degenerate quadratic, linear root {linear_root}")
        self.linear_root = linear_root


class NoSolution(AgmsdrError):
    """Coefficient equation has no real root (negative discriminant)."""


class NonEuclideanStrongConvexity(AgmsdrError):
    """mu > 0 updates are only defined for the Euclidean proximal setup."""


class CertificateViolation(AgmsdrError):
    """Internal consistency check failed: A_k f(x^k) exceeded the estimating
    sequence minimum beyond the admitted slack. Indicates a bug or a wrong
    user-supplied constant (e.g. L too small)."""


class UnknownOptimum(AgmsdrError):
    """A restart rule needs the optimal value and none was supplied."""


class InnerOracleFailure(AgmsdrError):
    """The inner maximization oracle of a dual problem returned garbage."""


class BudgetExceeded(AgmsdrError):
    """Evaluation budget exhausted before the requested tolerance.

    Scalar searches do not raise this; they return the best point found and
    set a flag. The class exists for callers that want to promote the flag
    to a hard error.
    """
