"""First-order oracles and proximal setups (norms, sharp map, Bregman divergence)."""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

from .exceptions import ZeroGradient

Vector = NDArray[np.float64]


class ObjectiveOracle:
    """A deterministic first-order oracle for f: R^n -> R.

    ``gradient`` may return any subgradient where f is not differentiable.
    Instances must be immutable after construction so that concurrent solver
    runs can share them.

    Oracles with exploitable structure may additionally provide any of:

    - ``line_argmin(z, d, lo, hi) -> (t, value)``: exact minimizer of
      f(z + t d) over [lo, hi], used for the coupling search;
    - ``ray_argmin(z, d) -> (t, value)``: the same over t >= 0, used for the
      descent step;
    - ``ray_poly(z, d) -> (c4, c3, c2, c1, c0)``: quartic coefficients of
      f(z + t d), enabling exact cubic-root line search;
    - ``subgradient_toward(x, w) -> g``: at nonsmooth points, a subgradient
      chosen to maximize <g, w>.

    Solvers use these when present and fall back to generic scalar searches
    otherwise.
    """

    dim: int

    def value(self, x: Vector) -> float:
        raise NotImplementedError

    def gradient(self, x: Vector) -> Vector:
        raise NotImplementedError


class FunctionOracle(ObjectiveOracle):
    """Oracle built from plain callables."""

    def __init__(self, dim: int, value_fn, grad_fn):
        self.dim = int(dim)
        self._value = value_fn
        self._grad = grad_fn

    def value(self, x: Vector) -> float:
        return float(self._value(x))

    def gradient(self, x: Vector) -> Vector:
        return np.asarray(self._grad(x), dtype=float)


class CountingOracle(ObjectiveOracle):
    """Wrapper counting every value/gradient call, line-search probes included.

    Structured-search methods of the wrapped oracle (line_argmin, ray_poly,
    ...) are forwarded untouched; closed-form searches perform no oracle
    evaluations, so there is nothing to count there.
    """

    def __init__(self, inner: ObjectiveOracle):
        self.inner = inner
        self.dim = inner.dim
        self.value_calls = 0
        self.grad_calls = 0

    @property
    def calls(self) -> int:
        return self.value_calls + self.grad_calls

    def value(self, x: Vector) -> float:
        self.value_calls += 1
        return self.inner.value(x)

    def gradient(self, x: Vector) -> Vector:
        self.grad_calls += 1
        return self.inner.gradient(x)

    def __getattr__(self, name: str):
        if name == "subgradient_toward":
            inner_fn = getattr(self.inner, name)

            def counted(x, w):
                self.grad_calls += 1
                return inner_fn(x, w)

            return counted
        if name in ("line_argmin", "ray_argmin", "ray_poly"):
            return getattr(self.inner, name)
        raise AttributeError(name)


class ProxSetup:
    """Norm pair, sharp map, prox-function d and Bregman divergence V.

    The prox-function must be 1-strongly convex w.r.t. ``norm`` and attain
    minimum value 0.
    """

    is_euclidean: bool = False

    def norm(self, x: Vector) -> float:
        raise NotImplementedError

    def dual_norm(self, g: Vector) -> float:
        raise NotImplementedError

    def sharp(self, g: Vector) -> Vector:
        """Unit-norm direction maximizing <g, s>. Raises ZeroGradient for g = 0."""
        raise NotImplementedError

    def prox_value(self, x: Vector) -> float:
        """d(x)."""
        raise NotImplementedError

    def bregman(self, x: Vector, z: Vector) -> float:
        """V(x, z) = d(x) - d(z) - <grad d(z), x - z>."""
        raise NotImplementedError

    def mirror_argmin(self, g: Vector, z: Vector) -> Vector:
        """argmin_x <g, x> + V(x, z), in closed form."""
        raise NotImplementedError


class EuclideanProx(ProxSetup):
    """Euclidean setup: d(x) = ||x||^2 / 2, V(x, z) = ||x - z||^2 / 2."""

    is_euclidean = True

    def norm(self, x: Vector) -> float:
        return float(np.linalg.norm(x))

    def dual_norm(self, g: Vector) -> float:
        return float(np.linalg.norm(g))

    def sharp(self, g: Vector) -> Vector:
        n = np.linalg.norm(g)
        if n == 0.0:
            raise ZeroGradient("sharp operator undefined for the zero vector")
        return np.asarray(g, dtype=float) / n

    def prox_value(self, x: Vector) -> float:
        return 0.5 * float(np.dot(x, x))

    def bregman(self, x: Vector, z: Vector) -> float:
        d = np.asarray(x, dtype=float) - z
        return 0.5 * float(np.dot(d, d))

    def mirror_argmin(self, g: Vector, z: Vector) -> Vector:
        return np.asarray(z, dtype=float) - g


def check_gradient(oracle: ObjectiveOracle, x: Vector, h: float | None = None) -> float:
    """Worst componentwise relative error between the analytic gradient and
    central finite differences.

    The step defaults to 1e-6 * (1 + ||x||_inf), balancing truncation and
    rounding error. Relative error uses a unit floor so near-zero components
    are compared absolutely.
    """
    x = np.asarray(x, dtype=float)
    if h is None:
        h = 1e-6 * (1.0 + float(np.max(np.abs(x))) if x.size else 1.0)
    g = np.asarray(oracle.gradient(x), dtype=float)
    worst = 0.0
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        fd = (oracle.value(x + e) - oracle.value(x - e)) / (2.0 * h)
        scale = max(1.0, abs(g[i]), abs(fd))
        worst = max(worst, abs(g[i] - fd) / scale)
    return worst
