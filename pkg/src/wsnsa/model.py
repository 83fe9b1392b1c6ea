"""Scenario configuration, node placement and plane geometry."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from typing import NamedTuple

import numpy as np

SELECTION_MODES = ("sa", "contest")
SEED_MODES = ("greedy", "random")

# Named sub-streams of the master seed. Changing these values changes every result.
STREAM_PLACEMENT = 0
STREAM_SA = 1
STREAM_CONTEST = 2


class ConfigError(ValueError):
    """A configuration violates one of its invariants.

    ``keys`` names the offending configuration keys so callers (the config file
    parser) can point at the line that introduced the problem.
    """

    def __init__(self, message: str, keys: tuple[str, ...] = ()):
        super().__init__(message)
        self.keys = keys


@dataclass(frozen=True)
class SAParams:
    t_init: float = 10.0
    cooling: float = 0.998
    inner_iters: int = 50
    t_min: float = 1e-3
    max_stall: int = 200

    def __post_init__(self):
        if not 0.0 < self.cooling < 1.0:
            raise ConfigError("cooling must lie in (0, 1)", ("cooling",))
        if not self.t_init > self.t_min > 0.0:
            raise ConfigError("need t_init > t_min > 0", ("t_init", "t_min"))
        if self.inner_iters < 1:
            raise ConfigError("inner_iters must be >= 1", ("inner_iters",))
        if self.max_stall < 1:
            raise ConfigError("max_stall must be >= 1", ("max_stall",))


@dataclass(frozen=True)
class ObjectiveWeights:
    w_count: float = 1.0
    w_energy: float = 0.1
    w_reserve: float = 0.5
    penalty_infeasible: float = 1e6

    def __post_init__(self):
        for name in ("w_count", "w_energy", "w_reserve"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0", (name,))
        if self.penalty_infeasible <= 0:
            raise ConfigError("penalty_infeasible must be > 0", ("penalty_infeasible",))


@dataclass(frozen=True)
class NetworkConfig:
    """All scenario parameters. Defaults reproduce the published scenario table.

    Radio constants the scenario table does not give (``eps_fs``, ``eps_mp``,
    ``packet_bits``) take the usual first-order LEACH radio values. ``d0`` is
    derived from the two amplifier constants and is not a free parameter.
    """

    area_side: float = 500.0
    n_sensors: int = 300
    n_supernodes: int = 25
    n_targets: int = 20
    r_comm: float = 90.0
    r_sense: float = 60.0
    e_init_sensor: float = 0.1
    e_init_super: float = 0.5
    e_elec: float = 50e-9
    eps_fs: float = 10e-12
    eps_mp: float = 0.0013e-12
    packet_bits: int = 4000
    sense_energy: float = 0.0
    sa: SAParams = field(default_factory=SAParams)
    weights: ObjectiveWeights = field(default_factory=ObjectiveWeights)
    selection_mode: str = "sa"
    seed_mode: str = "greedy"
    rng_seed: int = 0

    def __post_init__(self):
        for name in ("n_sensors", "n_supernodes", "n_targets", "packet_bits"):
            value = getattr(self, name)
            if int(value) != value or value <= 0:
                raise ConfigError(f"{name} must be a positive integer", (name,))
        for name in ("area_side", "r_comm", "r_sense", "e_init_sensor",
                     "e_init_super", "e_elec", "eps_fs", "eps_mp"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be > 0", (name,))
        if self.sense_energy < 0:
            raise ConfigError("sense_energy must be >= 0", ("sense_energy",))
        if self.r_comm < self.r_sense:
            raise ConfigError("r_comm must be >= r_sense", ("r_comm", "r_sense"))
        if self.n_supernodes >= self.n_sensors:
            raise ConfigError("n_supernodes must be < n_sensors",
                              ("n_supernodes", "n_sensors"))
        if self.selection_mode not in SELECTION_MODES:
            raise ConfigError(f"selection_mode must be one of {SELECTION_MODES}",
                              ("selection_mode",))
        if self.seed_mode not in SEED_MODES:
            raise ConfigError(f"seed_mode must be one of {SEED_MODES}", ("seed_mode",))
        if not 0 <= self.rng_seed < 2**64:
            raise ConfigError("rng_seed must be a 64-bit unsigned integer", ("rng_seed",))

    @property
    def d0(self) -> float:
        return math.sqrt(self.eps_fs / self.eps_mp)

    def flat(self) -> dict[str, object]:
        """Flatten to the key/value view used by config files and CSV headers."""
        out: dict[str, object] = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name in ("sa", "weights"):
                out.update({g.name: getattr(value, g.name) for g in fields(value)})
            else:
                out[f.name] = value
        return out

    @classmethod
    def from_flat(cls, values: dict[str, object]) -> "NetworkConfig":
        sa_keys = {f.name for f in fields(SAParams)}
        w_keys = {f.name for f in fields(ObjectiveWeights)}
        top = {k: v for k, v in values.items() if k not in sa_keys | w_keys}
        sa = SAParams(**{k: v for k, v in values.items() if k in sa_keys})
        weights = ObjectiveWeights(**{k: v for k, v in values.items() if k in w_keys})
        return cls(sa=sa, weights=weights, **top)

    def with_(self, **changes) -> "NetworkConfig":
        """Copy with flat-key overrides, e.g. ``cfg.with_(n_sensors=450, cooling=0.99)``."""
        values = self.flat()
        unknown = set(changes) - set(values)
        if unknown:
            raise KeyError(f"unknown config keys: {sorted(unknown)}")
        values.update(changes)
        return NetworkConfig.from_flat(values)


class Position(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class SensorNode:
    id: int
    position: Position
    e_init: float
    e_remaining: float


@dataclass(frozen=True)
class SuperNode:
    id: int
    position: Position
    e_remaining: float


@dataclass(frozen=True)
class Target:
    id: int
    position: Position


@dataclass
class Network:
    """Placed entities plus live energy state, stored column-wise.

    Sensor, super node and target ids are the row indices of the position arrays.
    Energies are mutated in place by the energy accounting of each round.
    """

    sensor_pos: np.ndarray
    super_pos: np.ndarray
    target_pos: np.ndarray
    sensor_energy: np.ndarray
    super_energy: np.ndarray
    e_init_sensor: float
    e_init_super: float

    @classmethod
    def from_positions(cls, sensors, supers, targets, e_init_sensor=0.1,
                       e_init_super=0.5) -> "Network":
        sensor_pos = np.asarray(sensors, dtype=float).reshape(-1, 2)
        super_pos = np.asarray(supers, dtype=float).reshape(-1, 2)
        target_pos = np.asarray(targets, dtype=float).reshape(-1, 2)
        return cls(
            sensor_pos=sensor_pos,
            super_pos=super_pos,
            target_pos=target_pos,
            sensor_energy=np.full(len(sensor_pos), float(e_init_sensor)),
            super_energy=np.full(len(super_pos), float(e_init_super)),
            e_init_sensor=float(e_init_sensor),
            e_init_super=float(e_init_super),
        )

    @property
    def n_sensors(self) -> int:
        return len(self.sensor_pos)

    @property
    def n_supernodes(self) -> int:
        return len(self.super_pos)

    @property
    def n_targets(self) -> int:
        return len(self.target_pos)

    @property
    def sensors(self) -> tuple[SensorNode, ...]:
        return tuple(
            SensorNode(i, Position(*map(float, p)), self.e_init_sensor, float(e))
            for i, (p, e) in enumerate(zip(self.sensor_pos, self.sensor_energy))
        )

    @property
    def supernodes(self) -> tuple[SuperNode, ...]:
        return tuple(
            SuperNode(i, Position(*map(float, p)), float(e))
            for i, (p, e) in enumerate(zip(self.super_pos, self.super_energy))
        )

    @property
    def targets(self) -> tuple[Target, ...]:
        return tuple(Target(i, Position(*map(float, p))) for i, p in enumerate(self.target_pos))

    def total_energy(self) -> float:
        return float(self.sensor_energy.sum() + self.super_energy.sum())

    def copy(self) -> "Network":
        return replace(self, sensor_energy=self.sensor_energy.copy(),
                       super_energy=self.super_energy.copy())


def substream(seed: int, stream: int) -> np.random.Generator:
    """Independent PCG64 generator for one named purpose under a master seed."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream,))))


def distance(a, b) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def pairwise_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Euclidean distance matrix, shape (len(a), len(b))."""
    diff = a[:, None, :] - b[None, :, :]
    return np.hypot(diff[..., 0], diff[..., 1])


def place_uniform(config: NetworkConfig, rng: np.random.Generator | None = None) -> Network:
    """Draw sensors, super nodes and targets uniformly over the square area.

    Draw order is sensors, super nodes, targets, each as an (n, 2) block, so a
    given generator state always yields the same layout.
    """
    if rng is None:
        rng = substream(config.rng_seed, STREAM_PLACEMENT)
    side = config.area_side
    sensors = rng.uniform(0.0, side, size=(config.n_sensors, 2))
    supers = rng.uniform(0.0, side, size=(config.n_supernodes, 2))
    targets = rng.uniform(0.0, side, size=(config.n_targets, 2))
    return Network.from_positions(sensors, supers, targets,
                                  config.e_init_sensor, config.e_init_super)
