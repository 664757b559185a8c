"""Local convex costs with subgradient oracles and the optimizer box.

The built-in families are separable L1-type costs (absolute deviation in 1-D,
L1 distance to a target vector in R^d) and the zero cost.  Their weighted sum
is minimized exactly on a per-coordinate box of weighted medians, which keeps
the distance-to-optimum computation exact.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from nco.linalg import StochasticVector

KIND_ABS = "absolute_deviation"
KIND_L1 = "l1"
KIND_ZERO = "zero"

GRID_RESOLUTION = 1e-3
GRID_CHECK_TOL = 1e-9


@dataclass(frozen=True)
class OptimizerBox:
    """Per-coordinate closed interval containing exactly the global minimizers."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        if np.any(self.lo > self.hi):
            raise ValueError("box has lo > hi")

    def clamp(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.lo, self.hi)

    def distance(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(np.linalg.norm(x - self.clamp(x)))

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lo) and np.all(x <= self.hi))

    def center(self) -> np.ndarray:
        # infinite coordinates (unconstrained) collapse to 0
        lo = np.where(np.isfinite(self.lo), self.lo, 0.0)
        hi = np.where(np.isfinite(self.hi), self.hi, 0.0)
        return (lo + hi) / 2.0


class ObjectiveSet:
    """n local costs sharing a dimension d, weighted by r."""

    def __init__(self, kinds, targets, d: int, r: StochasticVector):
        self.kinds = list(kinds)
        self.d = int(d)
        self.r = r
        n = r.n
        if len(self.kinds) != n:
            raise ValueError("one local cost per agent required")
        for k in self.kinds:
            if k not in (KIND_ABS, KIND_L1, KIND_ZERO):
                raise ValueError(f"unsupported objective kind {k!r}")
        if KIND_ABS in self.kinds and d != 1:
            raise ValueError("absolute deviation requires d = 1")
        targets = list(targets)
        if len(targets) != n:
            raise ValueError(f"expected {n} target rows, got {len(targets)}")
        V = np.zeros((n, d))
        for i, tgt in enumerate(targets):
            if self.kinds[i] != KIND_ZERO:
                V[i] = np.asarray(tgt, dtype=float).reshape(d)
        self.targets = V
        self._active = np.array([k != KIND_ZERO for k in self.kinds])
        per_agent_l = [0.0 if k == KIND_ZERO
                       else (1.0 if k == KIND_ABS else np.sqrt(d))
                       for k in self.kinds]
        self.L = float(max(per_agent_l))
        self._box = self._build_box()
        self.f_star = self.global_value(self._box.center())

    @property
    def n(self) -> int:
        return self.r.n

    # constructors -----------------------------------------------------

    @classmethod
    def absolute_deviation(cls, values, r: StochasticVector) -> "ObjectiveSet":
        values = np.asarray(values, dtype=float).reshape(-1, 1)
        return cls([KIND_ABS] * r.n, values, 1, r)

    @classmethod
    def alternating(cls, r: StochasticVector) -> "ObjectiveSet":
        """The 1-D benchmark: v_i = 2 (i mod 2) - 1 for agents i = 1..n."""
        v = [2.0 * (i % 2) - 1.0 for i in range(1, r.n + 1)]
        return cls.absolute_deviation(v, r)

    @classmethod
    def l1(cls, targets, r: StochasticVector) -> "ObjectiveSet":
        V = np.asarray(targets, dtype=float)
        return cls([KIND_L1] * r.n, V, V.shape[1], r)

    @classmethod
    def gaussian_pair(cls, d: int, seed: int, sigma_sq: float,
                      r: StochasticVector) -> "ObjectiveSet":
        """L1 costs toward w1 (odd agents) or w2 (even agents), w ~ N(0, sigma_sq)."""
        rng = np.random.default_rng(seed)
        w1 = rng.normal(0.0, np.sqrt(sigma_sq), d)
        w2 = rng.normal(0.0, np.sqrt(sigma_sq), d)
        V = np.array([w1 if i % 2 == 1 else w2 for i in range(1, r.n + 1)])
        return cls.l1(V, r)

    @classmethod
    def zero(cls, d: int, r: StochasticVector) -> "ObjectiveSet":
        return cls([KIND_ZERO] * r.n, np.zeros((r.n, d)), d, r)

    # evaluation -------------------------------------------------------

    def local_value(self, i: int, x) -> float:
        x = np.asarray(x, dtype=float).reshape(self.d)
        if self.kinds[i] == KIND_ZERO:
            return 0.0
        return float(np.abs(x - self.targets[i]).sum())

    def global_value(self, x) -> float:
        """sum_i r_i f_i(x) at a common point x."""
        x = np.asarray(x, dtype=float).reshape(self.d)
        vals = np.abs(x[None, :] - self.targets).sum(axis=1)
        vals = np.where(self._active, vals, 0.0)
        return float(np.dot(self.r.entries, vals))

    def subgradient(self, i: int, x) -> np.ndarray:
        """A subgradient of f_i at x; sign per coordinate with 0 at the kink."""
        x = np.asarray(x, dtype=float).reshape(self.d)
        if self.kinds[i] == KIND_ZERO:
            return np.zeros(self.d)
        return np.sign(x - self.targets[i])

    def subgradient_matrix(self, X: np.ndarray) -> np.ndarray:
        """Stacked subgradients; X may carry leading batch axes over (n, d)."""
        G = np.sign(X - self.targets)
        if not self._active.all():
            G = G * self._active[:, None]
        return G

    # optimizer set ----------------------------------------------------

    def optimizer_box(self) -> OptimizerBox:
        return self._box

    def distance_to_optimum(self, x) -> float:
        return self._box.distance(np.asarray(x, dtype=float).reshape(self.d))

    def _build_box(self) -> OptimizerBox:
        if not self._active.any():
            inf = np.full(self.d, np.inf)
            return OptimizerBox(lo=-inf, hi=inf)
        w = self.r.entries[self._active]
        V = self.targets[self._active]
        lo = np.empty(self.d)
        hi = np.empty(self.d)
        for k in range(self.d):
            lo[k], hi[k] = _weighted_median_interval(V[:, k], w)
        box = OptimizerBox(lo=lo, hi=hi)
        self._grid_check(box)
        return box

    def _grid_check(self, box: OptimizerBox) -> None:
        # guard the weighted-median computation with a dense 1-D search; the
        # grid includes the kink locations, where the exact minimum is attained
        for k in range(self.d):
            vk = self.targets[self._active, k]
            grid = np.union1d(
                np.arange(vk.min(), vk.max() + GRID_RESOLUTION, GRID_RESOLUTION),
                vk)
            w = self.r.entries[self._active]
            costs = np.abs(grid[:, None] - vk[None, :]) @ w
            gmin = costs.min()
            for endpoint in (box.lo[k], box.hi[k]):
                val = float(np.abs(endpoint - vk) @ w)
                if val > gmin + GRID_CHECK_TOL:
                    raise AssertionError(
                        f"optimizer box endpoint {endpoint} not minimal in "
                        f"coordinate {k}")


def _weighted_median_interval(v: np.ndarray, w: np.ndarray):
    """The interval of minimizers of x -> sum_i w_i |x - v_i|."""
    order = np.argsort(v)
    v = v[order]
    w = w[order]
    total = w.sum()
    cum = np.cumsum(w)
    half = total / 2.0
    tol = 1e-12 * max(total, 1.0)
    # minimizers: points where neither side holds more than half the weight
    idx = int(np.argmax(cum >= half - tol))
    if cum[idx] <= half + tol and idx + 1 < v.size:
        return float(v[idx]), float(v[idx + 1])
    return float(v[idx]), float(v[idx])
