"""Scalar minimization on intervals and rays, used by every solver step."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import NoDescent

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class LineSearchConfig:
    """Tolerance and budget for the one-dimensional searches.

    ``tol`` is an abscissa tolerance; interval searches scale it by
    (1 + interval length), ray searches use it as the initial bracket probe.
    """

    tol: float = 1e-10
    max_evals: int = 200
    bracket_growth: float = 2.0

    def __post_init__(self):
        if not self.tol > 0.0:
            raise ValueError("tol must be positive")
        if self.max_evals < 3:
            raise ValueError("max_evals must be at least 3")
        if not self.bracket_growth > 1.0:
            raise ValueError("bracket_growth must exceed 1")


DEFAULT_LS = LineSearchConfig()


@dataclass
class LineSearchResult:
    t: float
    value: float
    evals: int
    budget_exceeded: bool = False

    def __iter__(self):
        # allows ``t, v = minimize_on_interval(...)``
        yield self.t
        yield self.value


def minimize_on_interval(phi, lo: float, hi: float,
                         cfg: LineSearchConfig = DEFAULT_LS) -> LineSearchResult:
    """Golden-section minimization of ``phi`` over [lo, hi].

    Returns a point whose value never exceeds either endpoint value; for a
    unimodal phi the abscissa is within ``cfg.tol * (1 + hi - lo)`` of the
    interior minimizer. Deterministic for identical inputs.
    """
    if not lo < hi:
        raise ValueError("need lo < hi")
    tol = cfg.tol * (1.0 + (hi - lo))

    best_t, best_f = lo, float(phi(lo))
    f_hi = float(phi(hi))
    evals = 2
    if f_hi < best_f:
        best_t, best_f = hi, f_hi

    a, b = lo, hi
    x1 = b - _INVPHI * (b - a)
    x2 = a + _INVPHI * (b - a)
    f1, f2 = float(phi(x1)), float(phi(x2))
    evals += 2
    if f1 < best_f:
        best_t, best_f = x1, f1
    if f2 < best_f:
        best_t, best_f = x2, f2

    exceeded = False
    while (b - a) > tol:
        if evals >= cfg.max_evals:
            exceeded = True
            break
        if f1 < f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INVPHI * (b - a)
            f1 = float(phi(x1))
            evals += 1
        elif f2 < f1:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INVPHI * (b - a)
            f2 = float(phi(x2))
            evals += 1
        else:
            # exact tie: the minimum lies between the interior points, so
            # collapse both sides; on flat minimal stretches this converges
            # to their center rather than an edge
            a, b = x1, x2
            x1 = b - _INVPHI * (b - a)
            x2 = a + _INVPHI * (b - a)
            f1, f2 = float(phi(x1)), float(phi(x2))
            evals += 2
        if f1 < best_f:
            best_t, best_f = x1, f1
        if f2 < best_f:
            best_t, best_f = x2, f2

    mid = 0.5 * (a + b)
    f_mid = float(phi(mid))
    evals += 1
    if f_mid <= best_f:
        best_t, best_f = mid, f_mid

    return LineSearchResult(best_t, best_f, evals, exceeded)


def minimize_on_ray(phi, cfg: LineSearchConfig = DEFAULT_LS) -> LineSearchResult:
    """Minimize ``phi`` over h >= 0 by geometric bracketing then golden section.

    Probes h in {tol, tol*rho, tol*rho^2, ...} until the values turn upward,
    then refines the three-point bracket. Raises NoDescent when no probed h
    improves strictly on phi(0).
    """
    f0 = float(phi(0.0))
    evals = 1

    rho = cfg.bracket_growth
    h_prev, f_prev = 0.0, f0
    h_cur = cfg.tol
    f_cur = float(phi(h_cur))
    evals += 1
    best_t, best_f = (h_cur, f_cur) if f_cur < f0 else (0.0, f0)

    exceeded = False
    while True:
        h_next = h_cur * rho
        f_next = float(phi(h_next))
        evals += 1
        if f_next < best_f:
            best_t, best_f = h_next, f_next
        if f_next > f_cur and f_cur <= f_prev and f_cur < f0:
            # bracket [h_prev, h_next] with interior descent point h_cur;
            # the non-strict middle comparison admits flat minimal stretches
            break
        if evals >= cfg.max_evals:
            exceeded = True
            break
        h_prev, f_prev = h_cur, f_cur
        h_cur, f_cur = h_next, f_next

    if best_f >= f0:
        raise NoDescent(value_at_zero=f0)
    if exceeded:
        return LineSearchResult(best_t, best_f, evals, True)

    budget_left = max(3, cfg.max_evals - evals)
    inner = minimize_on_interval(
        phi, h_prev, h_next,
        LineSearchConfig(cfg.tol, budget_left, cfg.bracket_growth))
    evals += inner.evals
    if inner.value < best_f:
        best_t, best_f = inner.t, inner.value
    return LineSearchResult(best_t, best_f, evals, inner.budget_exceeded)


def minimize_cubic_ray(dphi_coeffs, phi) -> tuple[float, float]:
    """Exact line minimization when phi is a quartic polynomial of the step.

    ``dphi_coeffs`` are the four coefficients of d(phi)/dh, highest degree
    first. All real stationary points are candidates (the search covers the
    whole line, not just h >= 0); the one with the least phi value wins, ties
    going to the larger step. A cubic always has a real root, so the
    degenerate all-zero derivative is the only way to fall back to h = 0.
    """
    c = np.asarray(dphi_coeffs, dtype=float)
    if c.shape != (4,):
        raise ValueError("expected exactly four derivative coefficients")
    scale = float(np.max(np.abs(c)))
    if scale == 0.0:
        return 0.0, float(phi(0.0))
    trimmed = np.trim_zeros(np.where(np.abs(c) > 1e-14 * scale, c, 0.0), "f")
    if trimmed.size <= 1:
        return 0.0, float(phi(0.0))

    roots = np.roots(trimmed)
    real = [float(r.real) for r in roots if abs(r.imag) <= 1e-8 * (1.0 + abs(r))]
    if not real:
        return 0.0, float(phi(0.0))

    # Newton polish on the full cubic stamps out np.roots rounding.
    dp = np.polynomial.polynomial.Polynomial(c[::-1])
    ddp = dp.deriv()
    polished = []
    for r in real:
        for _ in range(3):
            slope = ddp(r)
            if slope == 0.0:
                break
            r = r - dp(r) / slope
        polished.append(r)

    best_h, best_v = None, math.inf
    for r in sorted(polished):
        v = float(phi(r))
        if v <= best_v:
            best_h, best_v = r, v
    return best_h, best_v
