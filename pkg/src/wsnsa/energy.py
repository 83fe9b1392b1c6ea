"""First-order LEACH radio model and per-round energy accounting."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .coverage import RelayPlan
    from .model import Network, NetworkConfig, SensorNode


class NegativeEnergy(RuntimeError):
    """A node was charged more than it holds; the planner let an unaffordable node in."""


@dataclass(frozen=True)
class EnergyModel:
    e_elec: float = 50e-9
    eps_fs: float = 10e-12
    eps_mp: float = 0.0013e-12
    packet_bits: int = 4000
    sense_energy: float = 0.0

    def __post_init__(self):
        if min(self.e_elec, self.eps_fs, self.eps_mp, self.packet_bits) <= 0:
            raise ValueError("radio constants and packet size must be positive")

    @property
    def d0(self) -> float:
        return math.sqrt(self.eps_fs / self.eps_mp)

    @classmethod
    def from_config(cls, config: NetworkConfig) -> "EnergyModel":
        return cls(config.e_elec, config.eps_fs, config.eps_mp,
                   config.packet_bits, config.sense_energy)


def tx_energy(model: EnergyModel, l: float, d: float) -> float:
    """Energy to transmit ``l`` bits over ``d`` meters.

    Free-space (d^2) amplifier below the crossover distance ``d0``, multipath
    (d^4) at or above it.
    """
    if d < model.d0:
        return l * model.e_elec + l * model.eps_fs * d * d
    return l * model.e_elec + l * model.eps_mp * d ** 4


def rx_energy(model: EnergyModel, l: float) -> float:
    return l * model.e_elec


@dataclass
class RoundCosts:
    """Joules charged in one round, keyed by node id. Only charged nodes appear."""

    monitor: dict[int, float] = field(default_factory=dict)
    relay: dict[int, float] = field(default_factory=dict)
    super_rx: dict[int, float] = field(default_factory=dict)

    def sensor_charges(self) -> dict[int, float]:
        out = dict(self.monitor)
        for n, c in self.relay.items():
            out[n] = out.get(n, 0.0) + c
        return out

    @property
    def total(self) -> float:
        return (sum(self.monitor.values()) + sum(self.relay.values())
                + sum(self.super_rx.values()))


def round_costs(plan: RelayPlan, model: EnergyModel) -> RoundCosts:
    """Charge every hop of every path in ``plan``.

    The monitor pays its first transmission (plus the sensing constant), each
    relay pays receive + transmit per packet it forwards, and the terminal super
    node pays one receive per packet.
    """
    costs = RoundCosts()
    l = model.packet_bits
    rx = rx_energy(model, l)
    n = plan.n_sensors
    for monitor in sorted(plan.paths):
        path = plan.paths[monitor]
        hops = plan.hop_lengths[monitor]
        costs.monitor[monitor] = (costs.monitor.get(monitor, 0.0)
                                  + tx_energy(model, l, hops[0]) + model.sense_energy)
        for relay, d in zip(path[1:-1], hops[1:]):
            costs.relay[relay] = costs.relay.get(relay, 0.0) + rx + tx_energy(model, l, d)
        s = path[-1] - n
        costs.super_rx[s] = costs.super_rx.get(s, 0.0) + rx
    return costs


def eligibility_threshold(model: EnergyModel, config: NetworkConfig) -> float:
    """Worst-case monitor + relay spend for one round, both at hop length r_comm."""
    l = model.packet_bits
    e_s1 = tx_energy(model, l, config.r_comm) + model.sense_energy
    e_c1 = rx_energy(model, l) + tx_energy(model, l, config.r_comm)
    return e_s1 + e_c1


def eligible(node: SensorNode, threshold: float) -> bool:
    return node.e_remaining >= threshold


def eligible_mask(network: Network, threshold: float) -> np.ndarray:
    return network.sensor_energy >= threshold


def apply_round(network: Network, costs: RoundCosts) -> Network:
    """Debit ``costs`` from ``network`` in place. Nothing is debited if any charge overdraws."""
    charges = costs.sensor_charges()
    for n, c in charges.items():
        if c > network.sensor_energy[n]:
            raise NegativeEnergy(
                f"sensor {n}: charge {c:.6g} J exceeds remaining {network.sensor_energy[n]:.6g} J")
    for s, c in costs.super_rx.items():
        if c > network.super_energy[s]:
            raise NegativeEnergy(
                f"super node {s}: charge {c:.6g} J exceeds remaining {network.super_energy[s]:.6g} J")
    for n, c in charges.items():
        network.sensor_energy[n] -= c
    for s, c in costs.super_rx.items():
        network.super_energy[s] -= c
    return network
