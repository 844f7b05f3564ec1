"""Universal dual solver for min f(x) s.t. Ax = b, with primal averaging.

The Lagrange dual is minimized as

    phi(lambda) = <lambda, b> + max_{x in Q} ( -f(x) - <A^T lambda, x> ),

whose subgradient is b - A x(lambda) by Danskin's theorem, with x(lambda)
any inner maximizer. Running the universal solver on phi from lambda_0 = 0
and averaging the inner maximizers with the coefficient weights yields a
primal point with certified feasibility and duality-gap bounds.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import logsumexp, softmax

from .exceptions import InnerOracleFailure
from .oracle import EuclideanProx, ObjectiveOracle, Vector
from .solvers import SolverConfig, SolverRun, Status, Universal

log = logging.getLogger("agmsdr.primal_dual")

_DIVERGENCE_NORM = 1e6


@dataclass(frozen=True)
class AffineConstraint:
    """Dense equality constraint A x = b."""

    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if A.ndim != 2 or b.ndim != 1 or A.shape[0] != b.size:
            raise ValueError("A must be (m, n) and b length m")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise ValueError("constraint data must be finite")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)


class DualProblem:
    """Constraint plus a closed-form inner oracle x(lambda) and f evaluator.

    ``max_value_fn``, when given, evaluates the inner maximum value
    max_x (-f(x) - <A^T lambda, x>) directly; used where that is numerically
    preferable to substituting the maximizer.
    """

    def __init__(self, constraint: AffineConstraint, inner_fn, f_fn, name: str,
                 max_value_fn=None):
        self.constraint = constraint
        self._inner = inner_fn
        self._f = f_fn
        self._max_value = max_value_fn
        self.name = name

    @property
    def m(self) -> int:
        return self.constraint.b.size

    def inner(self, lam: Vector) -> Vector:
        x = np.asarray(self._inner(lam), dtype=float)
        if not np.all(np.isfinite(x)):
            raise InnerOracleFailure(f"inner oracle returned non-finite x at "
                                     f"||lambda|| = {np.linalg.norm(lam):.3g}")
        return x

    def inner_max_value(self, lam: Vector) -> float:
        if self._max_value is not None:
            return float(self._max_value(lam))
        x = self.inner(lam)
        return -self.f_value(x) - float((self.constraint.A.T @ lam) @ x)

    def f_value(self, x: Vector) -> float:
        return float(self._f(x))


def dual_value_and_grad(problem: DualProblem, lam: Vector) -> tuple[float, Vector]:
    """phi(lambda) and its (sub)gradient b - A x(lambda)."""
    A, b = problem.constraint.A, problem.constraint.b
    x = problem.inner(lam)
    phi = float(lam @ b) + problem.inner_max_value(lam)
    return phi, b - A @ x


def make_quadratic_dual(A, b) -> DualProblem:
    """f(x) = ||x||^2 / 2 on Q = R^n; the inner maximizer is x = -A^T lambda."""
    con = AffineConstraint(np.asarray(A, dtype=float), np.asarray(b, dtype=float))

    def inner(lam):
        return -(con.A.T @ lam)

    def f(x):
        return 0.5 * float(x @ x)

    return DualProblem(con, inner, f, "quadratic")


def make_entropy_dual(A, b) -> DualProblem:
    """Negative entropy f(x) = sum x_j ln x_j over the probability simplex.

    The inner maximizer is the softmax of -A^T lambda, evaluated stably.
    """
    con = AffineConstraint(np.asarray(A, dtype=float), np.asarray(b, dtype=float))

    def inner(lam):
        return softmax(-(con.A.T @ lam))

    def f(x):
        x = np.asarray(x, dtype=float)
        return float(np.sum(np.where(x > 0.0, x * np.log(np.maximum(x, 1e-300)), 0.0)))

    def max_value(lam):
        return logsumexp(-(con.A.T @ lam))

    return DualProblem(con, inner, f, "entropy", max_value_fn=max_value)


class _DualOracle(ObjectiveOracle):
    """phi as a first-order oracle over the multiplier space."""

    def __init__(self, problem: DualProblem):
        self.problem = problem
        self.dim = problem.m

    def value(self, lam: Vector) -> float:
        b = self.problem.constraint.b
        return float(lam @ b) + self.problem.inner_max_value(lam)

    def gradient(self, lam: Vector) -> Vector:
        A, b = self.problem.constraint.A, self.problem.constraint.b
        return b - A @ self.problem.inner(lam)


@dataclass
class PrimalDualRecord:
    k: int
    f_hat: float
    phi_eta: float
    pd_gap: float
    feas_norm: float
    A: float
    lambda_norm: float


@dataclass
class PrimalDualReport:
    x_hat: Vector
    eta: Vector
    f_hat: float
    phi_eta: float
    pd_gap: float
    feas_norm: float
    status: Status
    trace: list[PrimalDualRecord] = field(default_factory=list)
    diverged: bool = False

    @property
    def iterations(self) -> int:
        return len(self.trace)


def pd_solve(problem: DualProblem, eps_f: float, eps_eq: float,
             max_iter: int = 5000, R_guess: float = 1.0,
             config: Optional[SolverConfig] = None) -> PrimalDualReport:
    """Run universal steps on the dual from lambda_0 = 0, maintaining the
    weighted primal average, until both stopping tests pass:

        |f(x_hat) + phi(eta)| <= eps_f   and   ||A x_hat - b||_2 <= eps_eq.

    The accuracy fed to the coefficient equation is min(eps_f, eps_eq * R_guess)
    so that both certified bounds drop below their targets once A_k is large.
    """
    if not (eps_f > 0.0 and eps_eq > 0.0):
        raise ValueError("eps_f and eps_eq must be positive")
    eps = min(eps_f, eps_eq * R_guess)
    if config is None:
        config = SolverConfig(variant=Universal(eps), max_iter=max_iter)
    elif not isinstance(config.variant, Universal):
        raise ValueError("pd_solve drives the Universal variant")

    oracle = _DualOracle(problem)
    prox = EuclideanProx()
    run = SolverRun(oracle, prox, config, np.zeros(problem.m))

    A_mat, b = problem.constraint.A, problem.constraint.b
    x_hat = np.zeros(A_mat.shape[1])
    trace: list[PrimalDualRecord] = []
    status = Status.MAX_ITER
    f_hat = problem.f_value(x_hat)
    phi_eta = run.f_x

    while True:
        A_prev = run.estimate.A
        rec = run.step()
        if rec is None:
            # the dual solver stopped on its own (stationary dual point)
            status = run.status if run.status is not None else Status.MAX_ITER
            break
        x_lam = problem.inner(run.last_y)
        x_hat = (rec.a * x_lam + A_prev * x_hat) / rec.A

        f_hat = problem.f_value(x_hat)
        phi_eta = rec.f_x
        pd_gap = abs(f_hat + phi_eta)
        feas = float(np.linalg.norm(A_mat @ x_hat - b))
        lam_norm = float(np.linalg.norm(run.x))
        trace.append(PrimalDualRecord(rec.k, f_hat, phi_eta, pd_gap, feas,
                                      rec.A, lam_norm))

        if pd_gap <= eps_f and feas <= eps_eq:
            status = Status.GAP_REACHED
            break
        if rec.k >= config.max_iter:
            status = Status.MAX_ITER
            break

    diverged = bool(trace) and trace[-1].lambda_norm > _DIVERGENCE_NORM
    if diverged:
        log.warning("dual iterate norm %.3g suggests an infeasible primal",
                    trace[-1].lambda_norm)
    pd_gap = abs(f_hat + phi_eta)
    feas = float(np.linalg.norm(A_mat @ x_hat - b))
    return PrimalDualReport(x_hat, run.x.copy(), f_hat, phi_eta, pd_gap, feas,
                            status, trace, diverged)
