"""Closed-form estimating sequence and the scalar coefficient equations.

The running lower model

    psi_k(x) = V(x, x0) + sum_i a_{i+1} [ f(y^i) + <g_i, x - y^i>
                                          + (mu/2) ||x - y^i||^2 ]

is stored as O(n) accumulators, never as a sum of k terms. Its minimizer and
minimum value are recomputed from the accumulators after every update, which
keeps long runs free of incremental drift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    AlreadyOptimal,
    DegenerateQuadratic,
    NoDecrease,
    NonEuclideanStrongConvexity,
    NoSolution,
)
from .oracle import ProxSetup, Vector


@dataclass
class EstimateState:
    """Accumulators describing psi_k. Owned by a single solver run."""

    prox: ProxSetup
    x0: Vector
    A: float = 0.0
    tau: float = 1.0
    g_sum: Vector = None  # type: ignore[assignment]
    lin_const: float = 0.0
    mu_y_sum: Vector = None  # type: ignore[assignment]
    mu_ysq_sum: float = 0.0
    v: Vector = None  # type: ignore[assignment]
    psi_min: float = 0.0

    def __post_init__(self):
        self.x0 = np.asarray(self.x0, dtype=float).copy()
        if self.g_sum is None:
            self.g_sum = np.zeros_like(self.x0)
        if self.mu_y_sum is None:
            self.mu_y_sum = np.zeros_like(self.x0)
        if self.v is None:
            self.v = self.x0.copy()

    def psi_at(self, x: Vector) -> float:
        """Evaluate psi_k at an arbitrary point from the accumulators."""
        x = np.asarray(x, dtype=float)
        val = self.prox.bregman(x, self.x0) + self.lin_const + float(self.g_sum @ x)
        if self.tau != 1.0:
            val += 0.5 * (self.tau - 1.0) * float(x @ x)
            val -= float(self.mu_y_sum @ x)
            val += self.mu_ysq_sum
        return val


def _refresh_minimizer(state: EstimateState) -> None:
    if state.tau == 1.0:
        state.v = state.prox.mirror_argmin(state.g_sum, state.x0)
    else:
        # Euclidean only: psi is tau-strongly convex with a linear part
        # (g_sum - x0 - mu_y_sum); the stationarity condition is linear.
        state.v = (state.x0 - state.g_sum + state.mu_y_sum) / state.tau
    state.psi_min = state.psi_at(state.v)


def add_linearization(state: EstimateState, a: float, y: Vector, f_y: float,
                      grad_y: Vector, mu: float, prox: ProxSetup) -> EstimateState:
    """Fold ``a * {f(y) + <g, x - y> + (mu/2)||x - y||^2}`` into psi.

    Updates A, tau and the linear/quadratic accumulators, then recomputes the
    minimizer v and psi_min in closed form. mu > 0 requires the Euclidean
    setup.
    """
    if not a > 0.0:
        raise ValueError("coefficient a must be positive")
    if mu > 0.0 and not prox.is_euclidean:
        raise NonEuclideanStrongConvexity(
            "strongly convex linearizations need the Euclidean prox")
    y = np.asarray(y, dtype=float)
    grad_y = np.asarray(grad_y, dtype=float)

    state.A += a
    state.tau += mu * a
    state.g_sum = state.g_sum + a * grad_y
    state.lin_const += a * (f_y - float(grad_y @ y))
    if mu > 0.0:
        state.mu_y_sum = state.mu_y_sum + mu * a * y
        state.mu_ysq_sum += 0.5 * mu * a * float(y @ y)
    _refresh_minimizer(state)
    return state


def psi_min_value(state: EstimateState) -> float:
    """psi_k(v^k), reconstructed from the accumulators."""
    return state.psi_at(state.v)


@dataclass(frozen=True)
class CoefficientInputs:
    """Scalars entering the strongly convex / universal coefficient equations."""

    A: float
    tau: float
    mu: float
    eps: float
    f_y: float
    f_xp: float
    grad_dual_norm: float
    vy_dist: float = 0.0


def solve_coef_smooth_known_L(A: float, L: float) -> float:
    """Greater root of a^2 / (A + a) = 1/L."""
    if not L > 0.0:
        raise ValueError("L must be positive")
    return (1.0 + math.sqrt(1.0 + 4.0 * A * L)) / (2.0 * L)


def solve_coef_smooth_linesearch(A: float, f_y: float, f_xp: float,
                                 gnorm: float) -> float:
    """Greater root of f(y) - a^2/(2(A+a)) ||g||^2 = f(x+).

    Requires strict descent f(x+) < f(y); otherwise the gradient at y is
    (numerically) zero and NoDecrease is raised.
    """
    delta = f_y - f_xp
    if not delta > 0.0:
        raise NoDecrease(f"f(x+) - f(y) = {-delta} >= 0")
    g2 = gnorm * gnorm
    return (delta + math.sqrt(delta * delta + 2.0 * A * delta * g2)) / g2


def _greater_root(c2: float, c1: float, c0: float, rel: float = 1e-12):
    """Greater root of c2 a^2 + c1 a + c0 = 0, with degenerate-lead detection."""
    scale = max(abs(c2), abs(c1), abs(c0))
    if abs(c2) <= rel * scale:
        if c1 == 0.0:
            raise DegenerateQuadratic(0.0)
        raise DegenerateQuadratic(-c0 / c1)
    disc = c1 * c1 - 4.0 * c2 * c0
    if disc < 0.0:
        raise NoSolution(f"negative discriminant {disc}")
    return (-c1 + math.sqrt(disc)) / (2.0 * c2)


def solve_coef_strongly_convex(inp: CoefficientInputs) -> float:
    """Greater root of the strongly convex coefficient equation

        (2 mu d + ||g||^2) a^2 + (2 d (tau + mu A) - mu tau ||v-y||^2) a
            + 2 tau A d = 0,   d = f(x+) - f(y) < 0.

    Reduces to the line-search coefficient at mu = 0. AlreadyOptimal signals
    2 mu d + ||g||^2 < 0, which certifies the iterate is already accurate.
    """
    delta = inp.f_xp - inp.f_y
    if not delta < 0.0:
        raise NoDecrease(f"delta = {delta} >= 0")
    g2 = inp.grad_dual_norm ** 2
    c2 = 2.0 * inp.mu * delta + g2
    if c2 < 0.0:
        raise AlreadyOptimal
    c1 = 2.0 * delta * (inp.tau + inp.mu * inp.A) - inp.mu * inp.tau * inp.vy_dist ** 2
    c0 = 2.0 * inp.tau * inp.A * delta
    return _greater_root(c2, c1, c0)


def solve_coef_universal(A: float, delta: float, eps: float, gnorm: float) -> float:
    """Greater root of the universal coefficient equation

        (||g||^2 / 2) a^2 + (d - eps/2) a + A d = 0,   d = f(x+) - f(y).

    A negative discriminant certifies the iterate is already eps/2-accurate
    and raises NoSolution.
    """
    if not gnorm > 0.0:
        raise ValueError("gnorm must be positive")
    g2 = gnorm * gnorm
    delta_eps = delta - 0.5 * eps
    disc = delta_eps * delta_eps - 2.0 * A * delta * g2
    if disc < 0.0:
        raise NoSolution(f"negative discriminant {disc}")
    a = (-delta_eps + math.sqrt(disc)) / g2
    if not a > 0.0:
        raise NoSolution(f"nonpositive root {a}")
    return a


def solve_coef_universal_sc(inp: CoefficientInputs) -> float:
    """Greater root of the strongly convex universal coefficient equation

        (2 mu d_eps + ||g||^2) a^2
          + (2 d_eps tau + 2 mu A d - mu tau ||v-y||^2) a + 2 tau A d = 0,

    with d = f(x+) - f(y) and d_eps = d - eps/2. At mu = 0 it reduces exactly
    to the universal equation, at eps = 0 to the strongly convex one.
    """
    delta = inp.f_xp - inp.f_y
    delta_eps = delta - 0.5 * inp.eps
    g2 = inp.grad_dual_norm ** 2
    c2 = 2.0 * inp.mu * delta_eps + g2
    if c2 <= 0.0:
        raise AlreadyOptimal
    c1 = (2.0 * delta_eps * inp.tau + 2.0 * inp.mu * inp.A * delta
          - inp.mu * inp.tau * inp.vy_dist ** 2)
    c0 = 2.0 * inp.tau * inp.A * delta
    try:
        a = _greater_root(c2, c1, c0)
    except NoSolution:
        # infeasible equation: already an eps/2-accurate solution
        raise AlreadyOptimal from None
    if not a > 0.0:
        raise AlreadyOptimal
    return a
