"""Communication-noise models with counter-based, order-independent seeding.

Every draw is a pure function of (master seed, domain, trial, t), realized
with a counter-based bit generator, so Monte Carlo trials can run in any
order (or in parallel) without shared mutable state.
"""

from dataclasses import dataclass

import numpy as np

KIND_GAUSSIAN = "gaussian"
KIND_NONE = "none"

# counter domains keep the independent sampling contexts disjoint
DOMAIN_RUN = 0
DOMAIN_ENSEMBLE = 1
DOMAIN_CONTINUATION = 2

_KEY_SALT = 0x9E3779B97F4A7C15


@dataclass(frozen=True)
class SeededStream:
    seed: int

    def rng(self, trial: int, t: int, domain: int = DOMAIN_RUN) -> np.random.Generator:
        bg = np.random.Philox(key=[np.uint64(self.seed) & np.uint64(2**64 - 1),
                                   np.uint64(_KEY_SALT)],
                              counter=[domain, 0, trial, t])
        return np.random.Generator(bg)


@dataclass(frozen=True)
class NoiseModel:
    kind: str
    sigma_sq: float
    d: int

    def __post_init__(self):
        if self.kind not in (KIND_GAUSSIAN, KIND_NONE):
            raise ValueError(f"unsupported noise kind {self.kind!r}")
        if self.sigma_sq < 0:
            raise ValueError("sigma_sq must be >= 0")

    @classmethod
    def gaussian(cls, sigma_sq: float, d: int) -> "NoiseModel":
        return cls(KIND_GAUSSIAN, float(sigma_sq), d)

    @classmethod
    def none(cls, d: int) -> "NoiseModel":
        return cls(KIND_NONE, 0.0, d)

    @property
    def gamma(self) -> float:
        """Second-moment bound E||e_i(t)||^2 <= gamma (tight for iid Gaussian)."""
        return self.d * self.sigma_sq if self.kind == KIND_GAUSSIAN else 0.0


def sample_noise_matrix(model: NoiseModel, stream: SeededStream, trial: int,
                        t: int, n: int, domain: int = DOMAIN_RUN) -> np.ndarray:
    """One n x d noise matrix E(t), iid per coordinate."""
    if t < 1:
        raise ValueError("t must be >= 1")
    if model.kind == KIND_NONE:
        return np.zeros((n, model.d))
    rng = stream.rng(trial, t, domain)
    return rng.normal(0.0, np.sqrt(model.sigma_sq), (n, model.d))


def sample_noise_block(model: NoiseModel, stream: SeededStream, t: int,
                       trials: int, n: int,
                       domain: int = DOMAIN_ENSEMBLE) -> np.ndarray:
    """A (trials, n, d) block of noise for one step of an ensemble run."""
    if model.kind == KIND_NONE:
        return np.zeros((trials, n, model.d))
    rng = stream.rng(0, t, domain)
    return rng.normal(0.0, np.sqrt(model.sigma_sq), (trials, n, model.d))


def mean_noise_second_moment(model: NoiseModel, r) -> float:
    """Exact E||r^T E||^2 = d sigma^2 sum_i r_i^2 for the iid Gaussian model."""
    if model.kind != KIND_GAUSSIAN:
        raise ValueError("defined for the Gaussian model only")
    value = model.d * model.sigma_sq * float(np.sum(r.entries ** 2))
    assert value <= model.gamma + 1e-15
    return value
