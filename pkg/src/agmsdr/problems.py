"""Benchmark objectives with analytic gradients and known or derivable optima."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .oracle import ObjectiveOracle, Vector


@dataclass
class NamedProblem:
    name: str
    oracle: ObjectiveOracle
    x0: Vector
    f_star: Optional[float] = None
    x_star: Optional[Vector] = None
    L: Optional[float] = None
    mu: Optional[float] = None
    params: dict = field(default_factory=dict)


class _NesterovWorst(ObjectiveOracle):
    """Tridiagonal quadratic chain used for the first-order lower bound:

        f(x) = L/8 (x_1^2 + sum_i (x_i - x_{i+1})^2 + x_n^2) - L/4 x_1.

    The gradient is L/4 (T x - e_1) with T the second-difference matrix, so
    the smoothness constant is L/4 * ||T|| < L.
    """

    def __init__(self, n: int, L: float):
        self.dim = n
        self.L = float(L)

    def value(self, x: Vector) -> float:
        q = x[0] ** 2 + float(np.sum((x[:-1] - x[1:]) ** 2)) + x[-1] ** 2
        return self.L / 8.0 * q - self.L / 4.0 * x[0]

    def gradient(self, x: Vector) -> Vector:
        g = 2.0 * x.astype(float).copy()
        g[:-1] -= x[1:]
        g[1:] -= x[:-1]
        g[0] -= 1.0
        return self.L / 4.0 * g


def nesterov_worst(n: int, L: float) -> NamedProblem:
    """Worst-case smooth convex chain; optimum from a direct linear solve."""
    if n < 2:
        raise ValueError("need n >= 2")
    oracle = _NesterovWorst(n, L)
    T = 2.0 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)
    x_star = np.linalg.solve(T, np.eye(n)[0])
    return NamedProblem(
        name="nesterov", oracle=oracle, x0=np.zeros(n),
        f_star=oracle.value(x_star), x_star=x_star, L=float(L), mu=None,
        params={"n": n, "L": float(L)})


class _MaxQ(ObjectiveOracle):
    """f(x) = max_i x_i^2.

    At a unique maximizer j the subgradient is 2 x_j e_j (argmax resolves
    exact ties to the lowest index). Where several coordinates tie for the
    maximum, ``gradient`` returns their averaged subgradient: pushing a
    single tied coordinate deadlocks the coupled method (the model minimizer
    drifts in one coordinate while the segment search pins y to x), whereas
    the average is still an exact subgradient and descends through the kink.
    ``subgradient_toward`` supplies the single tied piece best aligned with
    a requested direction, which is what the estimating-sequence analysis
    needs at segment minimizers.

    Line restrictions are maxima of |affine| functions, so both 1-D searches
    are solved exactly (``line_argmin`` / ``ray_argmin``).
    """

    _TIE_REL = 1e-9

    def __init__(self, n: int):
        self.dim = n

    def value(self, x: Vector) -> float:
        return float(np.max(x * x))

    def _tie_mask(self, x: Vector) -> Vector:
        q = x * x
        return q >= float(np.max(q)) * (1.0 - self._TIE_REL)

    def gradient(self, x: Vector) -> Vector:
        g = np.zeros(self.dim)
        tied = self._tie_mask(x)
        k = int(tied.sum())
        if k == 1:
            j = int(np.argmax(x * x))
            g[j] = 2.0 * x[j]
        else:
            g[tied] = 2.0 * x[tied] / k
        return g

    def subgradient_toward(self, x: Vector, w: Vector) -> Vector:
        """Among the tied maximal pieces, the subgradient maximizing <g, w>."""
        tied = np.flatnonzero(self._tie_mask(x))
        j = int(tied[int(np.argmax(2.0 * x[tied] * w[tied]))])
        g = np.zeros(self.dim)
        g[j] = 2.0 * x[j]
        return g

    def _line_min(self, z: Vector, d: Vector, lo: float, hi):
        """Exact minimizer of t -> max_i |z_i + t d_i| over [lo, hi]
        (hi None means +inf). Returns (t, f(z + t d))."""

        def envelope(t):
            return float(np.max(np.abs(z + t * d)))

        def right_slope(t):
            vals = np.abs(z + t * d)
            m = float(np.max(vals))
            active = vals >= m * (1.0 - 1e-13)
            arms = z[active] + t * d[active]
            slopes = np.where(arms > 0.0, d[active],
                              np.where(arms < 0.0, -d[active], np.abs(d[active])))
            return float(np.max(slopes)) if slopes.size else 0.0

        if right_slope(lo) >= 0.0:
            return lo, envelope(lo) ** 2
        if hi is not None and right_slope(hi) <= 0.0:
            return hi, envelope(hi) ** 2
        t_lo = lo
        t_hi = hi if hi is not None else max(1.0, 2.0 * abs(lo))
        if hi is None:
            while right_slope(t_hi) < 0.0:
                t_hi *= 2.0
                if t_hi > 1e18:
                    return t_hi, envelope(t_hi) ** 2
        for _ in range(120):
            mid = 0.5 * (t_lo + t_hi)
            if right_slope(mid) < 0.0:
                t_lo = mid
            else:
                t_hi = mid
        best_t = t_lo if envelope(t_lo) <= envelope(t_hi) else t_hi
        best_v = envelope(best_t)
        # snap to the closed-form kink or arm bottom the bisection converged to
        il = int(np.argmax(np.abs(z + t_lo * d)))
        ih = int(np.argmax(np.abs(z + t_hi * d)))
        span = 1e-6 * (1.0 + abs(t_hi))
        candidates = []
        if il != ih:
            for s in (1.0, -1.0):
                den = d[il] - s * d[ih]
                if den != 0.0:
                    candidates.append((s * z[ih] - z[il]) / den)
        elif d[il] != 0.0:
            candidates.append(-z[il] / d[il])
        for t in candidates:
            if t_lo - span <= t <= t_hi + span and lo <= t and (hi is None or t <= hi):
                v = envelope(t)
                if v <= best_v:
                    best_t, best_v = t, v
        return best_t, best_v ** 2

    def line_argmin(self, z: Vector, d: Vector, lo: float, hi: float):
        return self._line_min(np.asarray(z, float), np.asarray(d, float), lo, hi)

    def ray_argmin(self, z: Vector, d: Vector):
        return self._line_min(np.asarray(z, float), np.asarray(d, float), 0.0, None)


def maxq(n: int) -> NamedProblem:
    """Piecewise quadratic max function with the staircase initial point."""
    if n < 2 or n % 2:
        raise ValueError("need even n >= 2")
    x0 = np.arange(1, n + 1, dtype=float)
    x0[n // 2:] *= -1.0
    return NamedProblem(
        name="maxq", oracle=_MaxQ(n), x0=x0,
        f_star=0.0, x_star=np.zeros(n), L=None, mu=None, params={"n": n})


class _ChainedNonconvex(ObjectiveOracle):
    """f(x) = 1/4 (x_1 - 1)^2 + sum_{i<n} (x_{i+1} - 2 x_i^2 + 1)^2.

    A quartic polynomial, so its restriction to any line is a quartic of the
    step; ``ray_poly`` hands the solver those coefficients for exact line
    search.
    """

    def __init__(self, n: int):
        self.dim = n

    def _residuals(self, x: Vector) -> Vector:
        return x[1:] - 2.0 * x[:-1] ** 2 + 1.0

    def value(self, x: Vector) -> float:
        r = self._residuals(x)
        return 0.25 * (x[0] - 1.0) ** 2 + float(r @ r)

    def gradient(self, x: Vector) -> Vector:
        r = self._residuals(x)
        g = np.zeros(self.dim)
        g[0] = 0.5 * (x[0] - 1.0)
        g[1:] += 2.0 * r
        g[:-1] += -8.0 * x[:-1] * r
        return g

    def ray_poly(self, y: Vector, d: Vector):
        """Quartic coefficients (c4, c3, c2, c1, c0) of h -> f(y + h d)."""
        y = np.asarray(y, dtype=float)
        d = np.asarray(d, dtype=float)
        # residual_i(h) = alpha_i + beta_i h + gamma_i h^2
        alpha = y[1:] - 2.0 * y[:-1] ** 2 + 1.0
        beta = d[1:] - 4.0 * y[:-1] * d[:-1]
        gamma = -2.0 * d[:-1] ** 2
        c0 = float(alpha @ alpha) + 0.25 * (y[0] - 1.0) ** 2
        c1 = 2.0 * float(alpha @ beta) + 0.5 * (y[0] - 1.0) * d[0]
        c2 = float(beta @ beta) + 2.0 * float(alpha @ gamma) + 0.25 * d[0] ** 2
        c3 = 2.0 * float(beta @ gamma)
        c4 = float(gamma @ gamma)
        return c4, c3, c2, c1, c0


def chained_nonconvex(n: int) -> NamedProblem:
    """Hard nonconvex chain, global minimum 0 at the all-ones point."""
    if n < 2:
        raise ValueError("need n >= 2")
    return NamedProblem(
        name="chained", oracle=_ChainedNonconvex(n), x0=-np.ones(n),
        f_star=0.0, x_star=np.ones(n), L=None, mu=None, params={"n": n})


class _DiagonalQuadratic(ObjectiveOracle):
    """f(x) = 1/2 sum_j d_j (x_j - s_j)^2."""

    def __init__(self, spectrum: Vector, shift: Vector):
        self.d = np.asarray(spectrum, dtype=float)
        self.s = np.asarray(shift, dtype=float)
        self.dim = self.d.size

    def value(self, x: Vector) -> float:
        r = x - self.s
        return 0.5 * float((self.d * r) @ r)

    def gradient(self, x: Vector) -> Vector:
        return self.d * (x - self.s)


def quadratic(n: int, spectrum, shift, x0: Optional[Vector] = None) -> NamedProblem:
    """Diagonal quadratic generator; L and mu read off the spectrum."""
    spectrum = np.asarray(spectrum, dtype=float)
    shift = np.asarray(shift, dtype=float)
    if spectrum.shape != (n,) or shift.shape != (n,):
        raise ValueError("spectrum and shift must have length n")
    if np.any(spectrum < 0.0):
        raise ValueError("spectrum entries must be nonnegative")
    if x0 is None:
        x0 = np.zeros(n)
    mu = float(np.min(spectrum))
    return NamedProblem(
        name="quadratic", oracle=_DiagonalQuadratic(spectrum, shift),
        x0=np.asarray(x0, dtype=float),
        f_star=0.0, x_star=shift.copy(),
        L=float(np.max(spectrum)), mu=mu if mu > 0.0 else None,
        params={"n": n})
