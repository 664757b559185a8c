"""The two-time-scale update law and trajectory generation with diagnostics.

One step of the dynamic is

    X(t+1) = A(t) X(t) + beta(t) E(t) - alpha(t) G(t),

with A(t) = (1 - beta(t)) I + beta(t) W(t), noise matrix E(t), and stacked
subgradients G(t).  Diagnostics (consensus error, mean state, objective gap,
distance to the optimizer set) are computed in the same pass, so long runs
never retain the full state history.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from nco.linalg import StochasticVector, as_state_matrix, r_norm
from nco.network import GraphSequence, mixing
from nco.noise import (DOMAIN_CONTINUATION, DOMAIN_ENSEMBLE, NoiseModel,
                       SeededStream, sample_noise_block, sample_noise_matrix)
from nco.objectives import ObjectiveSet
from nco.schedules import PowerLawSchedule

NAN_CHECK_EVERY = 1000
CROSS_CHECK_TOL = 1e-12


class SimulationDiverged(RuntimeError):
    def __init__(self, t: int, trajectory: "Trajectory"):
        super().__init__(f"non-finite state detected at t={t}")
        self.t = t
        self.trajectory = trajectory


@dataclass
class SimulationConfig:
    graph: GraphSequence
    schedule: PowerLawSchedule
    objective: ObjectiveSet
    noise: NoiseModel
    T: int
    record_every: int = 100
    seed: int = 1
    trial: int = 0
    x0: Optional[np.ndarray] = None
    record_state: bool = False

    def __post_init__(self):
        if self.T < 1:
            raise ValueError("T must be >= 1")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")
        if self.objective.n != self.graph.n:
            raise ValueError("objective and graph disagree on n")
        if self.noise.d != self.objective.d:
            raise ValueError("noise and objective disagree on d")
        if self.x0 is not None:
            self.x0 = as_state_matrix(self.x0, n=self.n, d=self.d)

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def d(self) -> int:
        return self.objective.d

    @property
    def r(self) -> StochasticVector:
        return self.graph.r

    def stream(self) -> SeededStream:
        return SeededStream(self.seed)

    def initial_state(self) -> np.ndarray:
        if self.x0 is not None:
            return self.x0.copy()
        return np.zeros((self.n, self.d))


@dataclass
class DiagnosticsRecord:
    t: int
    delta: float
    std_max: float
    xbar: np.ndarray
    f_gap: float
    dist_opt: float
    sum_alpha_delta: float
    state: Optional[np.ndarray] = None


@dataclass
class Trajectory:
    records: list = field(default_factory=list)

    def append(self, rec: DiagnosticsRecord) -> None:
        if self.records and rec.t <= self.records[-1].t:
            raise ValueError("record timestamps must be strictly increasing")
        self.records.append(rec)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(rec, name) for rec in self.records])

    @property
    def final(self) -> DiagnosticsRecord:
        return self.records[-1]


def step(X: np.ndarray, t: int, config: SimulationConfig,
         E: Optional[np.ndarray] = None) -> np.ndarray:
    """One update X(t) -> X(t+1); E overrides the drawn noise matrix."""
    X = as_state_matrix(X, n=config.n, d=config.d)
    alpha, beta = config.schedule.eval(t)
    W = config.graph.weight(t)
    if E is None:
        E = sample_noise_matrix(config.noise, config.stream(), config.trial,
                                t, config.n)
    G = config.objective.subgradient_matrix(X)
    A = mixing(W, beta)
    X_mat = A @ X + beta * E - alpha * G
    X_row = (1.0 - beta) * X + beta * (W @ X + E) - alpha * G
    if not np.allclose(X_mat, X_row, rtol=0.0, atol=CROSS_CHECK_TOL):
        raise AssertionError("matrix-form and row-form updates disagree")
    return X_mat


def _diagnostics(X: np.ndarray, t: int, config: SimulationConfig,
                 sum_alpha_delta: float) -> DiagnosticsRecord:
    r = config.r
    xbar = r.entries @ X
    D = X - xbar[None, :]
    delta = r_norm(D, r)
    std_max = float(np.max(np.std(X, axis=0))) if config.n > 1 else 0.0
    f_gap = config.objective.global_value(xbar) - config.objective.f_star
    dist = config.objective.distance_to_optimum(xbar)
    return DiagnosticsRecord(
        t=t, delta=delta, std_max=std_max, xbar=xbar.copy(), f_gap=f_gap,
        dist_opt=dist, sum_alpha_delta=sum_alpha_delta,
        state=X.copy() if config.record_state else None)


def run(config: SimulationConfig) -> Trajectory:
    """Iterate the dynamic from X(1) through t = T, recording diagnostics.

    Deterministic given the seed; the recording cadence never affects the
    generated states.
    """
    stream = config.stream()
    X = config.initial_state()
    traj = Trajectory()
    sum_ad = 0.0
    # precompute step sizes to keep the loop lean
    ts = np.arange(1, config.T + 1)
    alphas = config.schedule.alpha(ts)
    r = config.r.entries
    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(1, config.T + 1):
            xbar = r @ X
            D = X - xbar[None, :]
            delta = float(np.sqrt(np.sum(config.r.entries
                                         * np.sum(D * D, axis=1))))
            # delta goes non-finite as soon as the state blows up, so this
            # doubles as a cheap per-step overflow/NaN guard
            if not np.isfinite(delta) or (t % NAN_CHECK_EVERY == 0
                                          and not np.all(np.isfinite(X))):
                raise SimulationDiverged(t, traj)
            sum_ad += alphas[t - 1] * delta
            if t == 1 or t % config.record_every == 0 or t == config.T:
                traj.append(_diagnostics(X, t, config, sum_ad))
            if t < config.T:
                E = sample_noise_matrix(config.noise, stream, config.trial, t,
                                        config.n)
                X = step(X, t, config, E=E)
    return traj


def run_to(config: SimulationConfig, t_stop: int) -> np.ndarray:
    """The state X(t_stop) of the (single-trial) reference run."""
    stream = config.stream()
    X = config.initial_state()
    for t in range(1, t_stop):
        E = sample_noise_matrix(config.noise, stream, config.trial, t, config.n)
        X = step(X, t, config, E=E)
    return X


def _ensemble_step(X: np.ndarray, t: int, config: SimulationConfig,
                   E: np.ndarray) -> np.ndarray:
    alpha, beta = config.schedule.eval(t)
    W = config.graph.weight(t)
    G = config.objective.subgradient_matrix(X)
    return (1.0 - beta) * X + beta * (np.matmul(W, X) + E) - alpha * G


def _ensemble_deltas(X: np.ndarray, r: StochasticVector) -> np.ndarray:
    xbar = np.einsum("j,kjl->kl", r.entries, X)
    D = X - xbar[:, None, :]
    return np.sqrt(np.einsum("j,kjl->k", r.entries, D * D))


def run_ensemble(config: SimulationConfig, trials: int, checkpoints):
    """Independent-trial run, vectorized over trials.

    Returns {t: array of delta(t) over trials} for the given checkpoints.
    """
    checkpoints = sorted(set(int(c) for c in checkpoints))
    stream = config.stream()
    X = np.broadcast_to(config.initial_state(),
                        (trials, config.n, config.d)).copy()
    out = {}
    for t in range(1, max(checkpoints) + 1):
        if t in checkpoints:
            out[t] = _ensemble_deltas(X, config.r)
        if t == max(checkpoints):
            break
        E = sample_noise_block(config.noise, stream, t, trials, config.n,
                               DOMAIN_ENSEMBLE)
        X = _ensemble_step(X, t, config, E)
    return out


def continue_window(config: SimulationConfig, X_start: np.ndarray, k: int,
                    steps: int, trials: int) -> np.ndarray:
    """Monte Carlo continuations: freeze X(k), run `steps` steps with fresh noise.

    Returns the (trials,) array of delta(k + steps) samples.
    """
    X = np.broadcast_to(as_state_matrix(X_start, n=config.n, d=config.d),
                        (trials, config.n, config.d)).copy()
    stream = config.stream()
    for t in range(k, k + steps):
        E = sample_noise_block(config.noise, stream, t, trials, config.n,
                               DOMAIN_CONTINUATION)
        X = _ensemble_step(X, t, config, E)
    return _ensemble_deltas(X, config.r)


def run_mean_second_moment(config: SimulationConfig, trials: int, ts):
    """MC estimate of E||xbar(t)||^2 against the exact iid-variance recursion.

    Requires the zero objective (so the mean state is driven by noise alone);
    returns a list of (t, mc_estimate, exact) triples.
    """
    if config.objective.L != 0.0:
        raise ValueError("requires the zero objective")
    ts = sorted(set(int(t) for t in ts))
    stream = config.stream()
    r = config.r
    xbar = np.broadcast_to(r.entries @ config.initial_state(),
                           (trials, config.d)).copy()
    rho = float(np.sum(r.entries ** 2))
    base = float(np.sum((r.entries @ config.initial_state()) ** 2))
    beta_sq_sum = 0.0
    results = []
    for t in range(1, max(ts) + 1):
        if t in ts:
            mc = float(np.mean(np.sum(xbar * xbar, axis=1)))
            exact = base + config.noise.d * config.noise.sigma_sq * rho * beta_sq_sum
            results.append((t, mc, exact))
        if t == max(ts):
            break
        _, beta = config.schedule.eval(t)
        E = sample_noise_block(config.noise, stream, t, trials, config.n,
                               DOMAIN_ENSEMBLE)
        xbar = xbar + beta * np.einsum("j,kjl->kl", r.entries, E)
        beta_sq_sum += beta * beta
    return results
