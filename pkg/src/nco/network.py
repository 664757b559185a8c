"""Time-varying weight matrices, connectivity analysis, and transition products.

A GraphSequence generates one row-stochastic weight matrix W(t) per step,
with r as a common left eigenvector, nonzero entries bounded below by eta,
and strong connectivity of every B-step edge union.  Mixing matrices
A(t) = (1 - beta(t)) I + beta(t) W(t) inherit both stochasticity properties.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import networkx as nx
import numpy as np

from nco.linalg import StochasticVector

EDGE_TOL = 1e-12


class ValidationError(ValueError):
    """A declared network property failed verification."""


@dataclass
class WeightMatrixReport:
    nonnegative: bool
    row_stochastic: bool
    left_eigenvector: bool
    entries_above_eta: bool
    min_nonzero: float

    @property
    def ok(self) -> bool:
        return (self.nonnegative and self.row_stochastic
                and self.left_eigenvector and self.entries_above_eta)

    def failures(self):
        names = ["nonnegative", "row_stochastic", "left_eigenvector",
                 "entries_above_eta"]
        return [k for k in names if not getattr(self, k)]


def validate_weight_matrix(W, r: StochasticVector, eta: float,
                           tol: float = 1e-12) -> WeightMatrixReport:
    """Check W against the weight-matrix requirements for the given (r, eta)."""
    W = np.asarray(W, dtype=float)
    n = r.n
    if W.shape != (n, n):
        raise ValidationError(f"expected a {n}x{n} matrix, got {W.shape}")
    nonneg = bool(np.all(W >= -tol))
    rows = bool(np.all(np.abs(W.sum(axis=1) - 1.0) <= tol))
    left = bool(np.all(np.abs(r.entries @ W - r.entries) <= tol))
    nz = W[W > EDGE_TOL]
    min_nz = float(nz.min()) if nz.size else float("inf")
    above = bool(min_nz >= eta - tol)
    return WeightMatrixReport(nonneg, rows, left, above, min_nz)


def cyclic_gossip(n: int, r: StochasticVector, t: int) -> np.ndarray:
    """Pairwise gossip matrix activating the edge (<t>, <t+1>), <i> = (i-1 mod n)+1."""
    if n < 2:
        raise ValueError("cyclic gossip needs n >= 2")
    if r.n != n:
        raise ValidationError("r length does not match n")
    p = (t - 1) % n
    q = t % n
    W = np.eye(n)
    rp, rq = r.entries[p], r.entries[q]
    for i in (p, q):
        W[i, p] = rp / (rp + rq)
        W[i, q] = rq / (rp + rq)
    return W


@dataclass
class GraphSequence:
    """A generator t -> W(t) with its declared connectivity parameters."""

    n: int
    weight_fn: Callable[[int], np.ndarray]
    eta: float
    B: int
    r: StochasticVector
    period: Optional[int] = None
    _cache: dict = field(default_factory=dict, repr=False)

    def weight(self, t: int) -> np.ndarray:
        if t < 1:
            raise ValueError("t must be >= 1")
        key = (t - 1) % self.period + 1 if self.period else t
        W = self._cache.get(key)
        if W is None:
            W = self.weight_fn(key)
            self._cache[key] = W
        return W

    @property
    def lam(self) -> float:
        return lambda_param(self.eta, self.r.r_min, self.B, self.n)

    def validate(self, horizon: Optional[int] = None) -> None:
        """Verify the declared (eta, B) against generated matrices; raise on mismatch."""
        horizon = horizon or (2 * self.period if self.period else 4 * self.B)
        for t in range(1, horizon + 1):
            rep = validate_weight_matrix(self.weight(t), self.r, self.eta)
            if not rep.ok:
                raise ValidationError(
                    f"W({t}) fails checks {rep.failures()} (min nonzero "
                    f"{rep.min_nonzero}, declared eta {self.eta})")
        B = detect_B(self, horizon)
        if B is None or B > self.B:
            raise ValidationError(
                f"declared B={self.B} not achieved within horizon {horizon} "
                f"(detected {B})")

    @classmethod
    def cyclic(cls, n: int, r: Optional[StochasticVector] = None) -> "GraphSequence":
        r = r or StochasticVector.uniform(n)
        eta = float(min(min(r.entries[i], r.entries[(i + 1) % n])
                        / (r.entries[i] + r.entries[(i + 1) % n])
                        for i in range(n)))
        B = n - 1
        return cls(n=n, weight_fn=lambda t: cyclic_gossip(n, r, t),
                   eta=eta, B=B, r=r, period=n)

    @classmethod
    def static(cls, W, r: StochasticVector, eta: Optional[float] = None,
               B: int = 1) -> "GraphSequence":
        W = np.asarray(W, dtype=float)
        if eta is None:
            nz = W[W > EDGE_TOL]
            eta = float(nz.min()) if nz.size else 1.0
        return cls(n=W.shape[0], weight_fn=lambda t: W, eta=eta, B=B, r=r,
                   period=1)

    @classmethod
    def complete(cls, n: int) -> "GraphSequence":
        return cls.static(np.full((n, n), 1.0 / n), StochasticVector.uniform(n))

    @classmethod
    def from_file(cls, path, r: StochasticVector) -> "GraphSequence":
        """Read a periodic sequence: whitespace-separated rows, blank line between steps."""
        mats = []
        block: list[list[float]] = []
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    if block:
                        mats.append(np.array(block, dtype=float))
                        block = []
                    continue
                block.append([float(v) for v in line.split()])
        if block:
            mats.append(np.array(block, dtype=float))
        if not mats:
            raise ValidationError(f"no matrices found in {path}")
        n = mats[0].shape[0]
        for M in mats:
            if M.shape != (n, n):
                raise ValidationError("inconsistent matrix shapes in file")
        nz = np.concatenate([M[M > EDGE_TOL] for M in mats])
        eta = float(nz.min()) if nz.size else 1.0
        g = cls(n=n, weight_fn=lambda t: mats[(t - 1) % len(mats)], eta=eta,
                B=1, r=r, period=len(mats))
        B = detect_B(g, 2 * len(mats) + 1)
        if B is None:
            raise ValidationError("matrix file sequence is not B-connected "
                                  "within two periods")
        g.B = B
        return g


def edges_at(g: GraphSequence, t: int):
    """Directed edges (j, i) read from nonzero off-diagonal entries of W(t)."""
    W = g.weight(t)
    out = []
    for i in range(g.n):
        for j in range(g.n):
            if i != j and W[i, j] > EDGE_TOL:
                out.append((j, i))
    return out


def detect_B(g: GraphSequence, horizon: int):
    """Smallest B with every union graph over (t, t+B] strongly connected.

    Exact for periodic sequences when horizon >= 2 * period; returns None when
    no such B exists up to the horizon.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    edge_sets = {t: set(edges_at(g, t)) for t in range(1, horizon + 1)}
    for B in range(1, horizon + 1):
        ok = True
        for t in range(0, horizon - B + 1):
            union = set()
            for k in range(t + 1, t + B + 1):
                union |= edge_sets[k]
            G = nx.DiGraph()
            G.add_nodes_from(range(g.n))
            G.add_edges_from(union)
            if not nx.is_strongly_connected(G):
                ok = False
                break
        if ok:
            return B
    return None


def lambda_param(eta: float, r_min: float, B: int, n: int) -> float:
    """The per-window contraction parameter eta * r_min / (2 B n^2)."""
    if not (0.0 < eta <= 1.0):
        raise ValueError(f"eta must be in (0, 1], got {eta}")
    if not (0.0 < r_min <= 1.0):
        raise ValueError(f"r_min must be in (0, 1], got {r_min}")
    if B < 1:
        raise ValueError("B must be >= 1")
    if n < 2:
        raise ValueError("n must be >= 2")
    return eta * r_min / (2.0 * B * n * n)


def mixing(W, beta: float) -> np.ndarray:
    """(1 - beta) I + beta W for beta in (0, 1]."""
    if not (0.0 < beta <= 1.0):
        raise ValueError(f"beta must be in (0, 1], got {beta}")
    W = np.asarray(W, dtype=float)
    return (1.0 - beta) * np.eye(W.shape[0]) + beta * W


def transition_product(g: GraphSequence, schedule, t: int, s: int) -> np.ndarray:
    """Phi(t:s) = A(t-1) ... A(s+1), with Phi(t:t-1) = I."""
    if t < s - 1:
        raise ValueError(f"need t >= s - 1, got t={t}, s={s}")
    P = np.eye(g.n)
    for k in range(s + 1, t):
        _, beta = schedule.eval(k)
        P = mixing(g.weight(k), beta) @ P
    return P
