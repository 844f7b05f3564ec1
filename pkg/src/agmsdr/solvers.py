"""One iteration driver for the whole solver family.

All variants share the same skeleton: a segment line search couples the
primal iterate x with the model minimizer v, a descent step produces the
next iterate, a scalar equation yields the weight a_{k+1}, and the
estimating sequence absorbs the new linearization. Only the descent step and
the coefficient equation differ between variants, so a single loop serves
all of them.
"""

from __future__ import annotations

import enum
import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from . import estimate as est
from .exceptions import (
    AlreadyOptimal,
    CertificateViolation,
    DegenerateQuadratic,
    NoDecrease,
    NoDescent,
    NoSolution,
    ZeroGradient,
)
from .linesearch import (
    DEFAULT_LS,
    LineSearchConfig,
    minimize_cubic_ray,
    minimize_on_interval,
    minimize_on_ray,
)
from .oracle import ObjectiveOracle, ProxSetup, Vector

log = logging.getLogger("agmsdr.solvers")


# ---------------------------------------------------------------------------
# configuration

@dataclass(frozen=True)
class SmoothKnownL:
    """Fixed-step descent x+ = y - ||g||/L * (g)^#, coefficient from
    a^2/(A+a) = 1/L."""

    L: float


@dataclass(frozen=True)
class SmoothLineSearch:
    """Steepest-descent ray search, coefficient from the achieved decrease."""


@dataclass(frozen=True)
class StronglyConvex:
    """mu-strongly convex estimating sequence. With L set the descent step is
    the fixed gradient step (option a), otherwise a ray search (option b)."""

    mu: float
    L: Optional[float] = None


@dataclass(frozen=True)
class Universal:
    """Accuracy-parametrized variant for Holder-smooth objectives."""

    eps: float


@dataclass(frozen=True)
class UniversalSC:
    """Universal variant with a mu-strongly convex estimating sequence."""

    mu: float
    eps: float


Variant = Union[SmoothKnownL, SmoothLineSearch, StronglyConvex, Universal, UniversalSC]


@dataclass(frozen=True)
class SolverConfig:
    variant: Variant
    max_iter: int = 1000
    R: Optional[float] = None
    target_gap: Optional[float] = None
    grad_tol: Optional[float] = None
    linesearch: LineSearchConfig = DEFAULT_LS
    coupling_interval: tuple[float, float] = (0.0, 1.0)
    use_cubic_ray: bool = False

    def __post_init__(self):
        v = self.variant
        if isinstance(v, SmoothKnownL) and not v.L > 0.0:
            raise ValueError("SmoothKnownL needs L > 0")
        if isinstance(v, StronglyConvex):
            if v.mu < 0.0:
                raise ValueError("StronglyConvex needs mu >= 0")
            if v.L is not None and not v.L > v.mu:
                raise ValueError("StronglyConvex option a needs L > mu")
        if isinstance(v, (Universal, UniversalSC)) and not v.eps > 0.0:
            raise ValueError("universal variants need eps > 0")
        if isinstance(v, UniversalSC) and v.mu < 0.0:
            raise ValueError("UniversalSC needs mu >= 0")
        lo, hi = self.coupling_interval
        if lo > 0.0 or hi < 1.0:
            raise ValueError("coupling interval must contain [0, 1]")
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")

    @property
    def mu(self) -> float:
        v = self.variant
        return v.mu if isinstance(v, (StronglyConvex, UniversalSC)) else 0.0

    @property
    def eps(self) -> float:
        v = self.variant
        return v.eps if isinstance(v, (Universal, UniversalSC)) else 0.0


class Status(enum.Enum):
    GAP_REACHED = "GapReached"
    GRAD_TOL_REACHED = "GradTolReached"
    STATIONARY = "Stationary"
    MAX_ITER = "MaxIter"


@dataclass
class IterationRecord:
    k: int
    f_x: float
    f_y: float
    grad_dual_norm_y: float
    A: float
    a: float
    beta: float
    h: float
    psi_min: float
    gap_bound: Optional[float]
    wall_time: float


@dataclass
class SolveReport:
    x_final: Vector
    f_final: float
    status: Status
    trace: list[IterationRecord] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return len(self.trace)


# ---------------------------------------------------------------------------
# driver

def gap_bound(estimate: est.EstimateState, f_xk: float, R: float,
              eps: float = 0.0) -> float:
    """Computable optimality-gap certificate f(x^k) - (psi_min - R^2/2)/A_k.

    Valid upper bound on f(x^k) - f(x_*) on convex problems whenever
    R >= ||x^0 - x_*||. Universal runs compare it against eps/2 when
    deciding to stop; the value itself does not depend on ``eps``.
    """
    if not estimate.A > 0.0:
        raise ValueError("gap bound needs A > 0")
    f_hat = (estimate.psi_min - 0.5 * R * R) / estimate.A
    return f_xk - f_hat


class SolverRun:
    """Mutable state of one solve. Drives a single step at a time so that
    restart loops and the primal-dual wrapper can interleave their own
    bookkeeping between iterations."""

    def __init__(self, oracle: ObjectiveOracle, prox: ProxSetup,
                 config: SolverConfig, x0: Vector):
        x0 = np.asarray(x0, dtype=float)
        if not np.all(np.isfinite(x0)):
            raise ValueError("x0 must be finite")
        if isinstance(config.variant, (StronglyConvex, UniversalSC)) \
                and config.mu > 0.0 and not prox.is_euclidean:
            raise ValueError("strongly convex variants need the Euclidean prox")
        self.oracle = oracle
        self.prox = prox
        self.config = config
        self.x = x0.copy()
        self.f_x = float(oracle.value(x0))
        self.estimate = est.EstimateState(prox, x0)
        self.trace: list[IterationRecord] = []
        self.status: Optional[Status] = None
        self.k = 0
        self.defect_sum = 0.0
        self.last_y: Optional[Vector] = None
        self.last_grad_y: Optional[Vector] = None
        self._t0 = time.perf_counter()

    # -- helpers ----------------------------------------------------------

    @property
    def v(self) -> Vector:
        return self.estimate.v

    def _adopt(self, point: Vector, value: float) -> None:
        if value < self.f_x:
            self.x = np.asarray(point, dtype=float).copy()
            self.f_x = value

    def _couple(self):
        """Segment search between v^k and x^k; returns (beta, y, f_y, exact)."""
        x, v = self.x, self.v
        if np.array_equal(x, v):
            return 0.0, x.copy(), self.f_x, True
        d = x - v
        lo, hi = self.config.coupling_interval

        structured = getattr(self.oracle, "line_argmin", None)
        if structured is not None:
            t, _ = structured(v, d, lo, hi)
            y = v + t * d
            val = float(self.oracle.value(y))
            if val > self.f_x:
                # exact landing at the x endpoint, re-evaluated within rounding
                return 1.0, x.copy(), self.f_x, True
            return t, y, val, True

        def phi(t):
            return self.oracle.value(v + t * d)

        res = minimize_on_interval(phi, lo, hi, self.config.linesearch)
        return res.t, v + res.t * d, res.value, False

    def _descent(self, y: Vector, f_y: float, g_y: Vector, gnorm: float):
        """Variant descent step; returns (h, x_new, f_new)."""
        v = self.config.variant
        if isinstance(v, SmoothKnownL) or (isinstance(v, StronglyConvex)
                                           and v.L is not None):
            h = gnorm / v.L
            x_new = y - h * self.prox.sharp(g_y)
            return h, x_new, float(self.oracle.value(x_new))
        return self._ray_descent(y, f_y, g_y)

    def _ray_descent(self, y: Vector, f_y: float, g_y: Vector):
        """Steepest-descent ray search along -sharp(g_y)."""
        direction = self.prox.sharp(g_y)

        structured = getattr(self.oracle, "ray_argmin", None)
        if structured is not None:
            h, _ = structured(y, -direction)
            x_new = y - h * direction
            f_new = float(self.oracle.value(x_new))
            if f_new >= f_y:
                raise NoDescent(value_at_zero=f_y)
            return h, x_new, f_new

        if self.config.use_cubic_ray:
            poly = getattr(self.oracle, "ray_poly", None)
            if poly is None:
                raise ValueError("use_cubic_ray requires an oracle with ray_poly")
            c4, c3, c2, c1, _ = poly(y, -direction)

            def phi_line(h):
                return self.oracle.value(y - h * direction)

            h, f_new = minimize_cubic_ray(
                [4.0 * c4, 3.0 * c3, 2.0 * c2, c1], phi_line)
            if f_new >= f_y:
                raise NoDescent(value_at_zero=f_y)
            return h, y - h * direction, f_new

        def phi_ray(h):
            return self.oracle.value(y - h * direction)

        res = minimize_on_ray(phi_ray, self.config.linesearch)
        return res.t, y - res.t * direction, res.value

    def _refine_coupling(self, beta_now: float):
        """Move the coupling point to where the directional derivative along
        x - v changes sign; there <grad f(y), v - y> >= 0 holds to full
        precision. Returns (beta, y, f_y) or None when no admissible point
        with f(y) <= f(x) is found (then the caller keeps the original y and
        accounts for the defect)."""
        d = self.x - self.v

        def dd(t: float) -> float:
            return float(np.asarray(self.oracle.gradient(self.v + t * d),
                                    dtype=float) @ d)

        if dd(0.0) > 0.0:
            # ascent from v onward: the segment minimum is at beta = 0
            f0 = float(self.oracle.value(self.v))
            if f0 <= self.f_x:
                return 0.0, self.v.copy(), f0
            return None
        lo_t, hi_t = 0.0, beta_now
        if dd(hi_t) <= 0.0:
            return None  # defect came from elsewhere; keep the original point
        for _ in range(80):
            mid = 0.5 * (lo_t + hi_t)
            if dd(mid) > 0.0:
                hi_t = mid
            else:
                lo_t = mid
        y = self.v + lo_t * d
        f_y = float(self.oracle.value(y))
        if f_y <= self.f_x:
            return lo_t, y, f_y
        return None

    def _coefficient(self, f_y: float, f_new: float, gnorm: float,
                     vy_dist: float) -> float:
        state, v = self.estimate, self.config.variant
        if isinstance(v, SmoothKnownL):
            return est.solve_coef_smooth_known_L(state.A, v.L)
        if isinstance(v, SmoothLineSearch):
            return est.solve_coef_smooth_linesearch(state.A, f_y, f_new, gnorm)
        if isinstance(v, StronglyConvex):
            if v.L is not None:
                return self._coef_sc_known_L(v.L, v.mu)
            inp = est.CoefficientInputs(state.A, state.tau, v.mu, 0.0,
                                        f_y, f_new, gnorm, vy_dist)
            try:
                return est.solve_coef_strongly_convex(inp)
            except DegenerateQuadratic:
                return self._fallback_coef(f_y, f_new, gnorm)
        if isinstance(v, Universal):
            return est.solve_coef_universal(state.A, f_new - f_y, v.eps, gnorm)
        if isinstance(v, UniversalSC):
            inp = est.CoefficientInputs(state.A, state.tau, v.mu, v.eps,
                                        f_y, f_new, gnorm, vy_dist)
            try:
                return est.solve_coef_universal_sc(inp)
            except DegenerateQuadratic:
                return self._fallback_coef(f_y, f_new, gnorm)
        raise TypeError(f"unknown variant {v!r}")

    def _coef_sc_known_L(self, L: float, mu: float) -> float:
        # greater root of (L - mu) a^2 - (tau + mu A) a - tau A = 0
        state = self.estimate
        b = state.tau + mu * state.A
        c = state.tau * state.A
        return (b + np.sqrt(b * b + 4.0 * (L - mu) * c)) / (2.0 * (L - mu))

    def _fallback_coef(self, f_y: float, f_new: float, gnorm: float) -> float:
        # degenerate coefficient equation: reuse the fixed-step rule with L
        # measured from the step just taken, which keeps the certificate valid
        delta = f_y - f_new
        if not delta > 0.0:
            raise NoDecrease("no decrease available for the fallback coefficient")
        L_est = gnorm * gnorm / (2.0 * delta)
        return est.solve_coef_smooth_known_L(self.estimate.A, L_est)

    def _check_certificate(self) -> None:
        state = self.estimate
        lhs = state.A * self.f_x
        slack = (self.defect_sum + 0.5 * state.A * self.config.eps
                 + 1e-7 * (1.0 + abs(state.psi_min) + state.A * abs(self.f_x)))
        if lhs > state.psi_min + slack:
            raise CertificateViolation(
                f"A f(x) = {lhs} > psi_min + slack = {state.psi_min + slack}")

    # -- one iteration -----------------------------------------------------

    def step(self) -> Optional[IterationRecord]:
        """Run one iteration. Returns the record, or None when the run ended
        (status is then set)."""
        if self.status is not None:
            return None
        if self.k >= self.config.max_iter:
            self.status = Status.MAX_ITER
            return None

        beta, y, f_y, coupled_exactly = self._couple()
        vy = self.v - y
        select = getattr(self.oracle, "subgradient_toward", None)
        if select is not None:
            # at kinks the analysis needs the subgradient best aligned with
            # v - y; elsewhere this coincides with the plain (sub)gradient
            g_y = np.asarray(select(y, vy), dtype=float)
        else:
            g_y = np.asarray(self.oracle.gradient(y), dtype=float)
        gnorm = self.prox.dual_norm(g_y)

        if gnorm == 0.0:
            self._adopt(y, f_y)
            self.status = Status.STATIONARY
            return None
        if self.config.grad_tol is not None and gnorm <= self.config.grad_tol:
            self._adopt(y, f_y)
            self.status = Status.GRAD_TOL_REACHED
            return None

        # the analysis needs <grad f(y), v - y> >= -eps_tilde; value-based
        # search cannot resolve the coupling below rounding noise, so refine
        # the disproportionate cases by bisecting the sign of the directional
        # derivative, which is noise-free
        inner = float(g_y @ vy)
        vy_dist = self.prox.norm(vy)
        if (not coupled_exactly and vy_dist > 0.0
                and inner < -1e-6 * gnorm * vy_dist):
            refined = self._refine_coupling(beta)
            if refined is not None:
                beta, y, f_y = refined
                g_y = np.asarray(self.oracle.gradient(y), dtype=float)
                gnorm = self.prox.dual_norm(g_y)
                if gnorm == 0.0:
                    self._adopt(y, f_y)
                    self.status = Status.STATIONARY
                    return None
                if (self.config.grad_tol is not None
                        and gnorm <= self.config.grad_tol):
                    self._adopt(y, f_y)
                    self.status = Status.GRAD_TOL_REACHED
                    return None
                vy = self.v - y
                inner = float(g_y @ vy)
                vy_dist = self.prox.norm(vy)

        self.last_y, self.last_grad_y = y, g_y
        defect = max(0.0, -inner)

        try:
            h, x_new, f_new = self._descent(y, f_y, g_y, gnorm)
        except (NoDescent, ZeroGradient):
            h = None
            if select is not None:
                # the consistency-selected piece may be blocked at a kink
                # while the averaged subgradient still descends through it
                g_desc = np.asarray(self.oracle.gradient(y), dtype=float)
                if not np.array_equal(g_desc, g_y):
                    try:
                        h, x_new, f_new = self._ray_descent(y, f_y, g_desc)
                    except (NoDescent, ZeroGradient):
                        h = None
            if h is None:
                if isinstance(self.config.variant, (Universal, UniversalSC)):
                    # a nonsmooth kink can block every probed ray without y
                    # being stationary; the eps slack in the coefficient
                    # equation admits a zero-length step and the model
                    # minimizer keeps moving, so later couplings escape
                    h, x_new, f_new = 0.0, y, f_y
                else:
                    self._adopt(y, f_y)
                    self.status = Status.STATIONARY
                    return None

        try:
            a = self._coefficient(f_y, f_new, gnorm, vy_dist)
        except (NoDecrease, AlreadyOptimal, NoSolution):
            self._adopt(y, f_y)
            self._adopt(x_new, f_new)
            self.status = Status.STATIONARY
            return None

        est.add_linearization(self.estimate, a, y, f_y, g_y, self.config.mu,
                              self.prox)
        self.x, self.f_x = x_new, f_new
        self.k += 1
        self.defect_sum += a * defect
        self._check_certificate()

        gap = None
        if self.config.R is not None and self.estimate.A > 0.0:
            gap = gap_bound(self.estimate, self.f_x, self.config.R)

        rec = IterationRecord(
            k=self.k, f_x=self.f_x, f_y=f_y, grad_dual_norm_y=gnorm,
            A=self.estimate.A, a=a, beta=beta, h=h,
            psi_min=self.estimate.psi_min, gap_bound=gap,
            wall_time=time.perf_counter() - self._t0)
        self.trace.append(rec)

        if (self.config.target_gap is not None and gap is not None
                and gap <= self.config.target_gap):
            self.status = Status.GAP_REACHED
        elif self.k >= self.config.max_iter:
            self.status = Status.MAX_ITER
        return rec

    def report(self) -> SolveReport:
        status = self.status if self.status is not None else Status.MAX_ITER
        return SolveReport(self.x.copy(), self.f_x, status, self.trace)


def solve(oracle: ObjectiveOracle, prox: ProxSetup, config: SolverConfig,
          x0: Vector,
          callback: Optional[Callable[[SolverRun, IterationRecord], None]] = None,
          ) -> SolveReport:
    """Run the configured variant from x0 until a stopping event.

    Stops when the certified gap bound reaches ``config.target_gap`` (needs
    ``config.R``), the gradient dual norm falls to ``config.grad_tol``, a
    stationarity signal fires inside the step, or ``config.max_iter`` is
    exhausted. ``callback(run, record)`` is invoked after every completed
    iteration.
    """
    run = SolverRun(oracle, prox, config, x0)
    while run.status is None:
        rec = run.step()
        if rec is not None and callback is not None:
            callback(run, rec)
    report = run.report()
    log.info("solve finished: status=%s iters=%d f=%.6g",
             report.status.value, report.iterations, report.f_final)
    return report
