"""Outer restart loops for weakly-quasi-convex and strongly convex objectives."""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .exceptions import UnknownOptimum
from .oracle import ObjectiveOracle, ProxSetup, Vector
from .solvers import (
    SmoothKnownL,
    SmoothLineSearch,
    SolveReport,
    SolverConfig,
    SolverRun,
    Status,
    Universal,
)

log = logging.getLogger("agmsdr.restarts")


@dataclass
class RestartReport:
    restart_iters: list[int]
    inner_reports: list[SolveReport]
    x_final: Vector
    f_final: float
    status: Status
    epoch_starts: list[Vector] = field(default_factory=list)

    @property
    def total_iters(self) -> int:
        return sum(self.restart_iters)


def _check_inner_variant(config: SolverConfig) -> None:
    v = config.variant
    if isinstance(v, (SmoothKnownL, SmoothLineSearch)):
        return
    if isinstance(v, Universal):
        # permitted, but the restart rate theory does not cover it
        log.warning("universal inner epochs are experimental in restart loops")
        return
    raise ValueError("restart loops drive SmoothKnownL or SmoothLineSearch epochs")


def solve_wqc(oracle: ObjectiveOracle, prox: ProxSetup, x0: Vector,
              gamma: float, f_star: Optional[float], target_eps: float,
              config: SolverConfig, max_epochs: Optional[int] = None,
              callback: Optional[Callable] = None) -> RestartReport:
    """Restarted method for gamma-weakly-quasi-convex objectives.

    Each epoch runs the inner solver until

        f(x) - f_star <= (1 - gamma/2) (f(x_epoch_start) - f_star),

    then restarts from the current iterate; the outer loop stops once
    f(x) - f_star <= target_eps. ``f_star`` may be a lower bound on the
    optimal value, which only delays restarts. ``config.max_iter`` caps the
    total iteration count across epochs.
    """
    if f_star is None:
        raise UnknownOptimum("the restart test needs f_star (or a lower bound)")
    if not 0.0 < gamma <= 1.0:
        raise ValueError("gamma must lie in (0, 1]")
    if not target_eps > 0.0:
        raise ValueError("target_eps must be positive")
    _check_inner_variant(config)

    return _run_restarts(
        oracle, prox, x0, config,
        stop_outer=lambda f: f - f_star <= target_eps,
        epoch_break=lambda run, f0:
            run.f_x - f_star <= (1.0 - gamma / 2.0) * (f0 - f_star),
        max_epochs=max_epochs, callback=callback)


def solve_sc_restart(oracle: ObjectiveOracle, prox: ProxSetup, x0: Vector,
                     mu: float, config: SolverConfig,
                     max_epochs: Optional[int] = None,
                     target_gap: Optional[float] = None,
                     f_star: Optional[float] = None,
                     callback: Optional[Callable] = None) -> RestartReport:
    """Restarted method for mu-strongly convex objectives.

    The distance halving test ||x - x_*||^2 <= ||x_epoch_start - x_*||^2 / 2
    is not observable, but the per-epoch gap certificate R_i^2 / (2 A_k)
    makes A_k >= 2/mu a sufficient surrogate, and the epoch radius cancels,
    so no estimate of it is needed.

    Runs until the total budget ``config.max_iter`` is spent, ``max_epochs``
    epochs complete, or (when both ``target_gap`` and ``f_star`` are given)
    f(x) - f_star <= target_gap.
    """
    if not mu > 0.0:
        raise ValueError("mu must be positive")
    _check_inner_variant(config)
    threshold = 2.0 / mu

    if target_gap is not None and f_star is not None:
        def stop_outer(f):
            return f - f_star <= target_gap
    else:
        def stop_outer(f):
            return False

    return _run_restarts(
        oracle, prox, x0, config,
        stop_outer=stop_outer,
        epoch_break=lambda run, f0: run.estimate.A >= threshold,
        max_epochs=max_epochs, callback=callback)


def _run_restarts(oracle: ObjectiveOracle, prox: ProxSetup, x0: Vector,
                  config: SolverConfig,
                  stop_outer: Callable[[float], bool],
                  epoch_break: Callable[[SolverRun, float], bool],
                  max_epochs: Optional[int],
                  callback: Optional[Callable] = None) -> RestartReport:
    x = np.asarray(x0, dtype=float).copy()
    f = float(oracle.value(x))
    used = 0
    restart_iters: list[int] = []
    inner_reports: list[SolveReport] = []
    epoch_starts: list[Vector] = []
    status = Status.MAX_ITER

    while True:
        if stop_outer(f):
            status = Status.GAP_REACHED
            break
        if max_epochs is not None and len(restart_iters) >= max_epochs:
            break
        budget = config.max_iter - used
        if budget <= 0:
            break

        epoch_cfg = dataclasses.replace(config, max_iter=budget,
                                        R=None, target_gap=None)
        run = SolverRun(oracle, prox, epoch_cfg, x)
        epoch_starts.append(x.copy())
        f0 = run.f_x
        iters = 0
        finished: Optional[str] = None
        while run.status is None:
            rec = run.step()
            if rec is None:
                break
            iters += 1
            if callback is not None:
                callback(run, rec)
            if stop_outer(run.f_x):
                finished = "outer"
                break
            if epoch_break(run, f0):
                finished = "restart"
                break
        used += iters
        restart_iters.append(iters)
        inner_reports.append(run.report())
        x = run.x.copy()
        f = run.f_x

        if finished == "outer":
            status = Status.GAP_REACHED
            break
        if finished == "restart":
            log.debug("restart %d after %d iters, f=%.6g",
                      len(restart_iters), iters, f)
            continue
        status = run.status if run.status is not None else Status.MAX_ITER
        break

    return RestartReport(restart_iters, inner_reports, x, f, status,
                         epoch_starts)
