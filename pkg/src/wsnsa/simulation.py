"""Round loop, lifetime counting and multi-seed batches."""

from __future__ import annotations

import logging
import statistics
from dataclasses import dataclass, field

import numpy as np

from .annealing import (Chromosome, Uncoverable, anneal, build_context, contest_select,
                        greedy_seed, random_seed)
from .coverage import (CommGraph, CoverageTable, RelayPlan, build_comm_graph,
                       build_coverage, build_plan, compute_routes, super_alive_mask)
from .energy import EnergyModel, RoundCosts, apply_round, eligibility_threshold, round_costs
from .model import (STREAM_CONTEST, STREAM_SA, Network, NetworkConfig, place_uniform,
                    substream)

log = logging.getLogger(__name__)

NO_COVERAGE = "NoCoverage"
NO_ROUTE = "NoRoute"


@dataclass
class RoundOutcome:
    round_index: int
    chromosome: Chromosome
    plan: RelayPlan
    costs: RoundCosts
    total_remaining_energy: float
    feasible: bool
    reason: str | None = None

    @property
    def monitors(self) -> int:
        if self.feasible:
            return len(self.plan.paths)
        return int(np.count_nonzero(self.chromosome))

    @property
    def relays(self) -> int:
        return len(self.plan.relays)

    @property
    def active_total(self) -> int:
        return len(self.plan.active) if self.feasible else self.monitors

    @property
    def round_energy(self) -> float:
        return self.costs.total


@dataclass
class SimReport:
    lifetime: int
    termination_reason: str
    rounds: list[RoundOutcome]
    config: NetworkConfig

    @property
    def seed(self) -> int:
        return self.config.rng_seed


@dataclass
class SimState:
    """Mutable state of one run. Geometry-derived tables are built once."""

    config: NetworkConfig
    network: Network
    coverage: CoverageTable
    graph: CommGraph
    model: EnergyModel
    threshold: float
    round_index: int = 0

    @classmethod
    def create(cls, config: NetworkConfig, network: Network | None = None) -> "SimState":
        if network is None:
            network = place_uniform(config)
        model = EnergyModel.from_config(config)
        return cls(config, network, build_coverage(network, config),
                   build_comm_graph(network, config), model,
                   eligibility_threshold(model, config))

    def eligible(self) -> np.ndarray:
        return self.network.sensor_energy >= self.threshold


def _failure_reason(state: SimState, eligible: np.ndarray) -> str:
    coverable = state.coverage.covers[eligible].any(axis=0)
    return NO_COVERAGE if not coverable.all() else NO_ROUTE


def _select(state: SimState, graph: CommGraph, eligible: np.ndarray, mode: str,
            rng: np.random.Generator):
    """Pick this round's monitors and their plan; ``None`` plan means no feasible set."""
    cfg = state.config
    routes = compute_routes(graph, eligible)
    usable = eligible & routes.routable
    if mode == "contest":
        try:
            bits = contest_select(state.network, state.coverage, state.threshold, 1.0,
                                  allowed=usable)
        except Uncoverable:
            return np.zeros(len(eligible), dtype=bool), None
        return bits, build_plan(routes, np.flatnonzero(bits))

    ctx = build_context(state.network, state.coverage, graph, eligible, state.model,
                        cfg.weights, routes)
    if cfg.seed_mode == "greedy":
        try:
            seed = greedy_seed(state.coverage, usable, state.network.sensor_energy)
        except Uncoverable:
            # no usable cover exists, annealing cannot find one either
            return np.zeros(len(eligible), dtype=bool), None
    else:
        seed = random_seed(rng, len(eligible), eligible)
    bits = anneal(seed, cfg.sa, ctx, rng)
    covered = state.coverage.covers[bits].any(axis=0).all()
    if not covered or not usable[bits].all():
        return bits, None
    return bits, ctx.plan(bits)


def run_round(state: SimState, mode: str | None = None,
              rng: np.random.Generator | None = None) -> RoundOutcome:
    """Initiative phase (selection + routing) then executive phase (energy charging).

    A selection whose real per-path charges would overdraw a node (a relay carrying
    several packets, a nearly empty super node) is redone with that node excluded.
    An infeasible round charges nothing.
    """
    cfg = state.config
    mode = mode or cfg.selection_mode
    if rng is None:
        rng = substream(cfg.rng_seed, STREAM_SA if mode == "sa" else STREAM_CONTEST)
    net = state.network
    state.round_index += 1
    base_eligible = state.eligible()
    eligible = base_eligible.copy()
    alive = super_alive_mask(net, state.model)

    while True:
        graph = state.graph.with_super_alive(alive)
        bits, plan = _select(state, graph, eligible, mode, rng)
        if plan is None:
            return RoundOutcome(state.round_index, bits, RelayPlan(net.n_sensors), RoundCosts(),
                                net.total_energy(), False, _failure_reason(state, base_eligible))
        costs = round_costs(plan, state.model)
        over_s = [n for n, c in costs.sensor_charges().items() if c > net.sensor_energy[n]]
        over_m = [s for s, c in costs.super_rx.items() if c > net.super_energy[s]]
        if not over_s and not over_m:
            break
        log.debug("round %d: excluding overdrawn sensors %s, super nodes %s",
                  state.round_index, over_s, over_m)
        eligible[over_s] = False
        alive[over_m] = False

    apply_round(net, costs)
    return RoundOutcome(state.round_index, bits, plan, costs, net.total_energy(), True)


def run_simulation(config: NetworkConfig, network: Network | None = None) -> SimReport:
    """Run rounds until the first one that cannot cover every target; lifetime counts the rest."""
    state = SimState.create(config, network)
    mode = config.selection_mode
    rng = substream(config.rng_seed, STREAM_SA if mode == "sa" else STREAM_CONTEST)
    rounds = []
    while True:
        outcome = run_round(state, mode, rng)
        rounds.append(outcome)
        if not outcome.feasible:
            break
    return SimReport(len(rounds) - 1, outcome.reason, rounds, config)


@dataclass
class RunSeries:
    """Per-round series of one run, feasible rounds only."""

    seed: int
    lifetime: int
    termination_reason: str
    monitors: np.ndarray
    relays: np.ndarray
    active: np.ndarray
    round_energy: np.ndarray
    remaining: np.ndarray
    initial_energy: float

    @classmethod
    def from_report(cls, report: SimReport, initial_energy: float) -> "RunSeries":
        ok = [r for r in report.rounds if r.feasible]
        return cls(
            seed=report.seed,
            lifetime=report.lifetime,
            termination_reason=report.termination_reason,
            monitors=np.array([r.monitors for r in ok], dtype=int),
            relays=np.array([r.relays for r in ok], dtype=int),
            active=np.array([r.active_total for r in ok], dtype=int),
            round_energy=np.array([r.round_energy for r in ok]),
            remaining=np.array([r.total_remaining_energy for r in ok]),
            initial_energy=initial_energy,
        )


@dataclass
class BatchResult:
    config: NetworkConfig
    runs: list[RunSeries] = field(default_factory=list)

    @property
    def seeds(self) -> list[int]:
        return [r.seed for r in self.runs]

    @property
    def lifetimes(self) -> list[int]:
        return [r.lifetime for r in self.runs]

    @property
    def mean(self) -> float:
        return statistics.fmean(self.lifetimes)

    @property
    def sd(self) -> float:
        return statistics.stdev(self.lifetimes) if len(self.runs) > 1 else 0.0

    @property
    def min(self) -> int:
        return min(self.lifetimes)

    @property
    def max(self) -> int:
        return max(self.lifetimes)

    def per_round_means(self) -> dict[str, np.ndarray]:
        """Across-run means per round index, truncated to the shortest run."""
        n = min(self.lifetimes)
        cols = ("monitors", "relays", "active", "round_energy", "remaining")
        return {c: np.mean([getattr(r, c)[:n] for r in self.runs], axis=0) if n
                else np.zeros(0) for c in cols}


def run_batch(config: NetworkConfig, n_runs: int = 10, base_seed: int | None = None,
              seeds=None) -> BatchResult:
    """Independent runs with seeds ``base_seed .. base_seed + n_runs - 1`` (or explicit ``seeds``)."""
    if seeds is None:
        if n_runs < 1:
            raise ValueError("n_runs must be >= 1")
        base = config.rng_seed if base_seed is None else base_seed
        seeds = range(base, base + n_runs)
    result = BatchResult(config)
    for seed in seeds:
        cfg = config.with_(rng_seed=int(seed))
        report = run_simulation(cfg)
        initial = (cfg.n_sensors * cfg.e_init_sensor + cfg.n_supernodes * cfg.e_init_super)
        result.runs.append(RunSeries.from_report(report, initial))
        log.info("seed %d: lifetime %d (%s)", seed, report.lifetime, report.termination_reason)
    return result


SWEEP_VARS = {"nodes": "n_sensors", "targets": "n_targets"}


def sweep_seeds(base_seed: int, n_runs: int, point_index: int) -> list[int]:
    """Seeds for one sweep point: the batch seeds XOR the point's index."""
    return [(base_seed + r) ^ point_index for r in range(n_runs)]


def run_sweep(config: NetworkConfig, var: str, values, n_runs: int = 10,
              base_seed: int | None = None) -> list[tuple[int, BatchResult]]:
    """One batch per value of ``var`` ("nodes" or "targets"), each with fresh placements."""
    key = SWEEP_VARS[var]
    base = config.rng_seed if base_seed is None else base_seed
    points = []
    for p, value in enumerate(values):
        cfg = config.with_(**{key: int(value)})
        points.append((int(value), run_batch(cfg, seeds=sweep_seeds(base, n_runs, p))))
    return points
