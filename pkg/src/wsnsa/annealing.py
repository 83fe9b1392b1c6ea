"""Per-round selection of monitoring sensors.

A chromosome is a boolean numpy vector over sensors (True = monitor this round).
Selection is either simulated annealing seeded by a greedy or random cover, or
the distributed waiting-time contest.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .coverage import CommGraph, CoverageTable, RelayPlan, RouteTable, build_plan, compute_routes
from .energy import EnergyModel, rx_energy, tx_energy
from .model import Network, ObjectiveWeights, SAParams

Chromosome = np.ndarray

CONTEST_BETA = 0.5


class Uncoverable(LookupError):
    def __init__(self, target: int):
        super().__init__(f"target {target} has no eligible covering sensor")
        self.target = target


def greedy_seed(coverage: CoverageTable, eligible: np.ndarray,
                energy: np.ndarray | None = None) -> Chromosome:
    """Cover targets in id order, each time taking the eligible coverer that sees most targets.

    Ties go to the higher remaining energy, then the lower sensor id.
    """
    covers = coverage.covers
    n, k = covers.shape
    eligible = np.asarray(eligible, dtype=bool)
    if energy is None:
        energy = np.zeros(n)
    m = coverage.m
    bits = np.zeros(n, dtype=bool)
    covered = np.zeros(k, dtype=bool)
    for t in range(k):
        if covered[t]:
            continue
        cands = np.flatnonzero(covers[:, t] & eligible)
        if cands.size == 0:
            raise Uncoverable(t)
        # lexsort: last key is primary
        pick = cands[np.lexsort((cands, -energy[cands], -m[cands]))[0]]
        bits[pick] = True
        covered |= covers[pick]
    return bits


def random_seed(rng: np.random.Generator, n: int, eligible: np.ndarray) -> Chromosome:
    return (rng.random(n) < 0.5) & np.asarray(eligible, dtype=bool)


def move_for(c: Chromosome, i: int, j: int, eligible: np.ndarray) -> Chromosome:
    """Neighbour of ``c`` for an explicit index pair; ``c`` itself if eligibility forbids it."""
    a, b = K.move_for(c, i, j, np.asarray(eligible, dtype=bool))
    return _toggled(c, a, b)


def neighbor(c: Chromosome, eligible: np.ndarray, rng: np.random.Generator) -> Chromosome:
    """Swap two random positions (flip one when they are equal), respecting eligibility.

    Gives up after N blocked draws and returns an unchanged copy.
    """
    a, b = K.propose(np.asarray(c, dtype=bool), np.asarray(eligible, dtype=bool), rng)
    return _toggled(c, a, b)


def _toggled(c, a, b):
    out = np.array(c, dtype=bool)
    if a >= 0:
        out[a] = not out[a]
    if b >= 0:
        out[b] = not out[b]
    return out


def accept(delta: float, temperature: float, rng: np.random.Generator) -> bool:
    """Metropolis rule for a maximised objective."""
    return bool(K.accept(float(delta), float(temperature), rng))


@dataclass(frozen=True)
class EvalContext:
    """Everything the objective needs for one round, flattened for the compiled kernel."""

    eligible: np.ndarray
    routes: RouteTable
    coverage: CoverageTable
    weights: ObjectiveWeights
    cov_ptr: np.ndarray
    cov_idx: np.ndarray
    rel_ptr: np.ndarray
    rel_idx: np.ndarray
    norm: np.ndarray
    cost: np.ndarray

    @property
    def n_sensors(self) -> int:
        return len(self.eligible)

    @property
    def n_targets(self) -> int:
        return self.coverage.covers.shape[1]

    @property
    def routable(self) -> np.ndarray:
        return self.routes.routable

    def plan(self, c: Chromosome) -> RelayPlan:
        return build_plan(self.routes, np.flatnonzero(c))

    def _kernel_args(self):
        return (self.n_targets, self.cov_ptr, self.cov_idx, self.routable, self.rel_ptr,
                self.rel_idx, self.norm, self.cost)

    def _weight_args(self):
        w = self.weights
        return (float(w.w_count), float(w.w_energy), float(w.w_reserve),
                float(w.penalty_infeasible))


def _csr(rows):
    ptr = np.zeros(len(rows) + 1, dtype=np.int64)
    ptr[1:] = np.cumsum([len(r) for r in rows])
    idx = np.fromiter((v for r in rows for v in r), dtype=np.int64, count=int(ptr[-1]))
    return ptr, idx


def build_context(network: Network, coverage: CoverageTable, graph: CommGraph,
                  eligible: np.ndarray, model: EnergyModel, weights: ObjectiveWeights,
                  routes: RouteTable | None = None) -> EvalContext:
    eligible = np.asarray(eligible, dtype=bool)
    if routes is None:
        routes = compute_routes(graph, eligible)
    n = network.n_sensors
    l = model.packet_bits
    rx = rx_energy(model, l)

    cov_ptr, cov_idx = coverage.csr

    # A monitor's packet costs its own transmission, then receive + transmit at
    # every relay, then one receive at the super node. Walk sensors in hop order so
    # each next hop's chain is known before it is needed.
    interior: list[list[int]] = [[] for _ in range(n)]
    cost = np.zeros(n)
    chain = np.zeros(n)  # forwarding cost of everything after this sensor's first hop
    order = np.flatnonzero(routes.routable)
    order = order[np.argsort(routes.hops[order], kind="stable")]
    for v in order.tolist():
        nxt = int(routes.next_hop[v])
        if nxt < n:
            interior[v] = [nxt] + interior[nxt]
            chain[v] = rx + tx_energy(model, l, routes.dist[nxt, routes.next_hop[nxt]]) + chain[nxt]
        cost[v] = tx_energy(model, l, routes.dist[v, nxt]) + model.sense_energy + chain[v] + rx
    rel_ptr, rel_idx = _csr(interior)

    norm = network.sensor_energy / network.e_init_sensor
    return EvalContext(eligible, routes, coverage, weights, cov_ptr, cov_idx,
                       rel_ptr, rel_idx, norm, cost)


def objective(c: Chromosome, ctx: EvalContext) -> float:
    """Score of a monitor set, higher is better.

    Infeasible sets score ``-penalty - uncovered targets``. Feasible sets trade off
    the number of active sensors (monitors and relays), the round energy in mJ and
    the mean normalised remaining energy of the active sensors.
    """
    bits = np.asarray(c, dtype=bool)
    return float(K.score_full(bits, *ctx._kernel_args(), *ctx._weight_args()))


def anneal(seed: Chromosome, params: SAParams, ctx: EvalContext,
           rng: np.random.Generator) -> Chromosome:
    """Simulated annealing from ``seed``; returns the best chromosome visited."""
    best, _, _ = anneal_stats(seed, params, ctx, rng)
    return best


def anneal_stats(seed: Chromosome, params: SAParams, ctx: EvalContext,
                 rng: np.random.Generator) -> tuple[Chromosome, float, int]:
    """Like :func:`anneal` but also returns the best score and the number of cooling steps."""
    bits, score, outer = K.anneal_kernel(
        np.asarray(seed, dtype=bool), ctx.eligible, *ctx._kernel_args(), *ctx._weight_args(),
        float(params.t_init), float(params.cooling), int(params.inner_iters),
        float(params.t_min), int(params.max_stall), rng)
    return bits, float(score), int(outer)


def temperatures(params: SAParams):
    """The cooling schedule the annealer walks, one value per outer step."""
    t = params.t_init
    while t >= params.t_min:
        yield t
        t *= params.cooling


def waiting_times(network: Network, coverage: CoverageTable, threshold: float, w: float,
                  allowed: np.ndarray | None = None) -> np.ndarray:
    """Contest delay per sensor. Nodes below the energy threshold (or not allowed) wait the full ``w``."""
    energy = network.sensor_energy
    ok = energy >= threshold
    if allowed is not None:
        ok &= np.asarray(allowed, dtype=bool)
    m = coverage.m
    m_max = m[ok].max() if ok.any() else 0
    target_deficit = 1.0 - m / m_max if m_max > 0 else np.ones_like(energy)
    energy_deficit = 1.0 - energy / network.e_init_sensor
    t = w * (CONTEST_BETA * energy_deficit + (1.0 - CONTEST_BETA) * target_deficit)
    return np.where(ok, t, w)


def contest_select(network: Network, coverage: CoverageTable, threshold: float,
                   w: float = 1.0, allowed: np.ndarray | None = None) -> Chromosome:
    """Waiting-time contest: nodes fire in order of delay and claim still-uncovered targets.

    ``allowed`` further restricts who may compete (e.g. sensors with a route).
    """
    if w <= 0:
        raise ValueError("w must be positive")
    t = waiting_times(network, coverage, threshold, w, allowed)
    covers = coverage.covers
    n, k = covers.shape
    covered = np.zeros(k, dtype=bool)
    bits = np.zeros(n, dtype=bool)
    for s in np.lexsort((np.arange(n), t)).tolist():
        if t[s] >= w:
            break
        if (covers[s] & ~covered).any():
            bits[s] = True
            covered |= covers[s]
    missing = np.flatnonzero(~covered)
    if missing.size:
        raise Uncoverable(int(missing[0]))
    return bits
