"""Experiment configuration files and CSV emission.

Config files are flat key=value text with dotted group prefixes
(graph.type=cyclic_gossip), "#" comments, UTF-8.  Unknown keys are rejected,
as are missing required keys, always naming the offending key.  CSV output
uses shortest round-trip decimal formatting so figures lose no precision.
"""

import re
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from nco.dynamics import SimulationConfig, Trajectory
from nco.linalg import StochasticVector
from nco.network import GraphSequence
from nco.noise import NoiseModel
from nco.objectives import ObjectiveSet
from nco.schedules import PowerLawSchedule


class ConfigError(ValueError):
    pass


KNOWN_KEYS = {
    "n", "d", "T", "seed", "record_every", "trials", "record_state",
    "graph.type", "graph.r", "graph.file",
    "objective.type", "objective.v",
    "noise.kind", "noise.sigma_sq",
    "schedule.alpha0", "schedule.nu", "schedule.beta0", "schedule.mu",
    "schedule.one_time_scale",
}

REQUIRED_KEYS = [
    "n", "d", "T", "graph.type", "objective.type", "noise.kind",
    "schedule.alpha0", "schedule.nu", "schedule.beta0", "schedule.mu",
]

DEFAULTS = {
    "seed": "1",
    "record_every": "100",
    "trials": "1",
    "record_state": "false",
    "graph.r": "uniform",
    "schedule.one_time_scale": "false",
}

_GAUSSIAN_RE = re.compile(r"gaussian\(\s*(\d+)\s*,\s*([0-9.eE+-]+)\s*\)")


def parse_config_text(text: str) -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = val
    return values


def _as_bool(val: str, key: str) -> bool:
    if val.lower() in ("true", "1", "yes"):
        return True
    if val.lower() in ("false", "0", "no"):
        return False
    raise ConfigError(f"key {key!r}: expected a boolean, got {val!r}")


@dataclass
class ExperimentConfig:
    values: dict = field(default_factory=dict)
    explicit: frozenset = frozenset()

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_text(fh.read())

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        values = parse_config_text(text)
        missing = [k for k in REQUIRED_KEYS if k not in values]
        if missing:
            raise ConfigError(f"missing required keys: {', '.join(missing)}")
        merged = dict(DEFAULTS)
        merged.update(values)
        cfg = cls(values=merged, explicit=frozenset(values))
        cfg.build()  # fail early on inconsistent values
        return cfg

    def serialize(self) -> str:
        lines = [f"{k}={self.values[k]}" for k in sorted(self.values)]
        return "\n".join(lines) + "\n"

    # typed accessors --------------------------------------------------

    def _int(self, key: str) -> int:
        try:
            return int(self.values[key])
        except ValueError:
            raise ConfigError(f"key {key!r}: expected an integer, got "
                              f"{self.values[key]!r}") from None

    def _float(self, key: str) -> float:
        try:
            return float(self.values[key])
        except ValueError:
            raise ConfigError(f"key {key!r}: expected a number, got "
                              f"{self.values[key]!r}") from None

    @property
    def trials(self) -> int:
        return self._int("trials")

    @property
    def seed(self) -> int:
        return self._int("seed")

    # component builders -----------------------------------------------

    def _build_r(self, n: int) -> StochasticVector:
        spec = self.values["graph.r"]
        if spec == "uniform":
            return StochasticVector.uniform(n)
        parts = [float(p) for p in spec.split(",")]
        if len(parts) != n:
            raise ConfigError(f"key 'graph.r': expected {n} entries")
        return StochasticVector.create(parts)

    def _build_graph(self, n: int) -> GraphSequence:
        r = self._build_r(n)
        kind = self.values["graph.type"]
        if kind == "cyclic_gossip":
            return GraphSequence.cyclic(n, r)
        if kind == "static":
            return GraphSequence.static(np.full((n, n), 1.0 / n), r)
        if kind == "custom-from-file":
            path = self.values.get("graph.file")
            if path is None:
                raise ConfigError("missing required keys: graph.file")
            return GraphSequence.from_file(path, r)
        raise ConfigError(f"key 'graph.type': unknown type {kind!r}")

    def _build_objective(self, n: int, d: int,
                         r: StochasticVector) -> ObjectiveSet:
        kind = self.values["objective.type"]
        if kind == "zero":
            return ObjectiveSet.zero(d, r)
        vspec = self.values.get("objective.v")
        if vspec is None:
            raise ConfigError("missing required keys: objective.v")
        if kind == "absolute_deviation":
            if vspec == "alternating":
                return ObjectiveSet.alternating(r)
            vals = [float(p) for p in vspec.split(",")]
            if len(vals) != n:
                raise ConfigError(f"key 'objective.v': expected {n} values")
            return ObjectiveSet.absolute_deviation(vals, r)
        if kind == "l1":
            m = _GAUSSIAN_RE.fullmatch(vspec)
            if m:
                return ObjectiveSet.gaussian_pair(d, int(m.group(1)),
                                                  float(m.group(2)), r)
            rows = [[float(p) for p in row.split(",")]
                    for row in vspec.split(";")]
            if len(rows) != n or any(len(row) != d for row in rows):
                raise ConfigError(f"key 'objective.v': expected {n} rows of "
                                  f"{d} values (';' between rows)")
            return ObjectiveSet.l1(np.array(rows), r)
        raise ConfigError(f"key 'objective.type': unknown type {kind!r}")

    def _build_noise(self, d: int) -> NoiseModel:
        kind = self.values["noise.kind"]
        if kind == "none":
            return NoiseModel.none(d)
        if kind == "gaussian":
            if "noise.sigma_sq" not in self.values:
                raise ConfigError("missing required keys: noise.sigma_sq")
            return NoiseModel.gaussian(self._float("noise.sigma_sq"), d)
        raise ConfigError(f"key 'noise.kind': unknown kind {kind!r}")

    def _build_schedule(self) -> PowerLawSchedule:
        return PowerLawSchedule(
            alpha0=self._float("schedule.alpha0"),
            nu=self._float("schedule.nu"),
            beta0=self._float("schedule.beta0"),
            mu=self._float("schedule.mu"),
            one_time_scale=_as_bool(self.values["schedule.one_time_scale"],
                                    "schedule.one_time_scale"),
        )

    def build(self, seed=None) -> SimulationConfig:
        n = self._int("n")
        d = self._int("d")
        graph = self._build_graph(n)
        objective = self._build_objective(n, d, graph.r)
        return SimulationConfig(
            graph=graph,
            schedule=self._build_schedule(),
            objective=objective,
            noise=self._build_noise(d),
            T=self._int("T"),
            record_every=self._int("record_every"),
            seed=self.seed if seed is None else int(seed),
            record_state=_as_bool(self.values["record_state"], "record_state"),
        )


def bundled_config_path(name: str):
    """Resolve a bundled config name (e.g. 'fig2_topleft') to a file path."""
    res = resources.files("nco") / "configs" / f"{name}.cfg"
    if not res.is_file():
        raise ConfigError(f"no bundled config named {name!r}")
    return res


def load_config(name_or_path) -> ExperimentConfig:
    """Load a config from a path, falling back to the bundled set by name."""
    import os
    if os.path.exists(name_or_path):
        return ExperimentConfig.from_file(name_or_path)
    res = resources.files("nco") / "configs" / f"{name_or_path}.cfg"
    if res.is_file():
        return ExperimentConfig.from_text(res.read_text(encoding="utf-8"))
    raise ConfigError(f"config not found: {name_or_path!r} (not a file and "
                      f"not a bundled name)")


def benchmark_config(seed: int = 1, T: int = 100000,
                     **overrides) -> SimulationConfig:
    """The 6-agent cyclic-gossip benchmark with alternating targets."""
    r = StochasticVector.uniform(6)
    cfg = SimulationConfig(
        graph=GraphSequence.cyclic(6, r),
        schedule=PowerLawSchedule(alpha0=0.0055, nu=0.77, beta0=0.21, mu=0.6),
        objective=ObjectiveSet.alternating(r),
        noise=NoiseModel.gaussian(0.1, 1),
        T=T,
        seed=seed,
    )
    for k, v in overrides.items():
        setattr(cfg, k, v)
    return cfg


# CSV emission ---------------------------------------------------------

def _fmt(x: float) -> str:
    return repr(float(x))


def csv_header(config: SimulationConfig) -> str:
    cols = ["t", "delta", "std_max", "xbar_norm", "f_gap", "dist_opt",
            "sum_alpha_delta"]
    if config.record_state:
        cols += [f"x_{i}_{k}" for i in range(1, config.n + 1)
                 for k in range(1, config.d + 1)]
    return ",".join(cols)


def csv_row(rec, config: SimulationConfig) -> str:
    vals = [str(rec.t), _fmt(rec.delta), _fmt(rec.std_max),
            _fmt(np.linalg.norm(rec.xbar)), _fmt(rec.f_gap),
            _fmt(rec.dist_opt), _fmt(rec.sum_alpha_delta)]
    if config.record_state:
        vals += [_fmt(v) for v in rec.state.ravel()]
    return ",".join(vals)


def write_csv(traj: Trajectory, config: SimulationConfig, path,
              aborted_at=None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(csv_header(config) + "\n")
        for rec in traj.records:
            fh.write(csv_row(rec, config) + "\n")
        if aborted_at is not None:
            fh.write(f"# aborted at t={aborted_at}\n")
