"""Weight vectors, state matrices, and the weighted row norm.

Every agent keeps a row vector in R^d; the stack of all agent states is an
n x d matrix.  Disagreement between agents is always measured in the norm
weighted by the (positive, normalized) vector r, which is also the left
eigenvector of every mixing matrix.
"""

from dataclasses import dataclass

import numpy as np


class DimensionError(ValueError):
    """Raised when matrix/vector shapes do not agree."""


SUM_TOL = 1e-12


@dataclass(frozen=True)
class StochasticVector:
    """Positive weights summing to one.

    Construction normalizes the given entries (divide by their sum) and
    rejects non-positive entries.
    """

    entries: np.ndarray
    r_min: float

    @classmethod
    def create(cls, entries) -> "StochasticVector":
        e = np.asarray(entries, dtype=float)
        if e.ndim != 1 or e.size == 0:
            raise ValueError("entries must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(e)):
            raise ValueError("entries must be finite")
        if np.any(e <= 0.0):
            raise ValueError("all entries must be strictly positive")
        e = e / e.sum()
        e.setflags(write=False)
        return cls(entries=e, r_min=float(e.min()))

    @classmethod
    def uniform(cls, n: int) -> "StochasticVector":
        return cls.create(np.full(n, 1.0 / n))

    @property
    def n(self) -> int:
        return self.entries.size

    def __post_init__(self):
        s = float(np.sum(self.entries))
        if abs(s - 1.0) > SUM_TOL:
            raise ValueError(f"entries sum to {s}, expected 1")


def as_state_matrix(X, n: int | None = None, d: int | None = None) -> np.ndarray:
    """Coerce to a 2-D float array of agent rows, checking shape and finiteness."""
    M = np.asarray(X, dtype=float)
    if M.ndim == 1:
        M = M[:, None]
    if M.ndim != 2:
        raise DimensionError(f"expected a 2-D state matrix, got ndim={M.ndim}")
    if n is not None and M.shape[0] != n:
        raise DimensionError(f"expected {n} rows, got {M.shape[0]}")
    if d is not None and M.shape[1] != d:
        raise DimensionError(f"expected {d} columns, got {M.shape[1]}")
    if not np.all(np.isfinite(M)):
        raise ValueError("state matrix contains non-finite entries")
    return M


def r_norm(M, r: StochasticVector) -> float:
    """sqrt(sum_i r_i ||M_i||^2) over the rows of M."""
    M = as_state_matrix(M, n=r.n)
    return float(np.sqrt(np.sum(r.entries * np.sum(M * M, axis=1))))


def weighted_mean(X, r: StochasticVector) -> np.ndarray:
    """The weighted average state r^T X (a row vector of length d)."""
    X = as_state_matrix(X, n=r.n)
    return r.entries @ X


def deviation(X, r: StochasticVector):
    """Split X into its weighted mean and the disagreement around it.

    Returns (D, delta) with D = X - 1 * (r^T X) and delta = ||D||_r.
    By construction r^T D = 0.
    """
    X = as_state_matrix(X, n=r.n)
    xbar = r.entries @ X
    D = X - xbar[None, :]
    return D, r_norm(D, r)
