"""Decentralized subgradient consensus simulation over noisy time-varying networks."""

from nco.linalg import StochasticVector, r_norm, weighted_mean, deviation
from nco.schedules import PowerLawSchedule, classify_region, validate_assumption4
from nco.network import GraphSequence, cyclic_gossip, lambda_param, mixing
from nco.objectives import ObjectiveSet
from nco.noise import NoiseModel, SeededStream
from nco.dynamics import SimulationConfig, run, step

__all__ = [
    "StochasticVector",
    "r_norm",
    "weighted_mean",
    "deviation",
    "PowerLawSchedule",
    "classify_region",
    "validate_assumption4",
    "GraphSequence",
    "cyclic_gossip",
    "lambda_param",
    "mixing",
    "ObjectiveSet",
    "NoiseModel",
    "SeededStream",
    "SimulationConfig",
    "run",
    "step",
]
