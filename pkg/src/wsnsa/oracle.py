"""Brute-force references for small instances, used to check the router and the annealer."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .annealing import Chromosome
from .coverage import CommGraph, CoverageTable, RelayPlan, build_plan, compute_routes

MAX_SENSORS = 20


class TooLarge(ValueError):
    pass


@dataclass(frozen=True)
class OracleResult:
    """``optimum`` is None when no feasible monitor set exists."""

    optimum: int | None
    witness: Chromosome | None
    plan: RelayPlan | None

    @property
    def feasible(self) -> bool:
        return self.optimum is not None


def hop_oracle(graph: CommGraph, src: int, eligible: np.ndarray) -> int | None:
    """Plain breadth-first search from ``src`` to the nearest super node; None if unreachable."""
    n = graph.n_sensors
    seen = {src}
    queue = deque([(src, 0)])
    while queue:
        v, d = queue.popleft()
        for u in np.flatnonzero(graph.adj[v]).tolist():
            if u in seen:
                continue
            if u >= n:
                return d + 1
            if eligible[u]:
                seen.add(u)
                queue.append((u, d + 1))
    return None


def min_cover_bruteforce(coverage: CoverageTable, graph: CommGraph,
                         eligible: np.ndarray) -> OracleResult:
    """Smallest number of active sensors (monitors plus distinct relays) over all monitor sets.

    Every subset of eligible sensors is tried, each monitor using its relay route.
    Ties go to the lexicographically smallest chromosome.
    """
    covers = coverage.covers
    n, k = covers.shape
    if n > MAX_SENSORS:
        raise TooLarge(f"{n} sensors; exhaustive search is limited to {MAX_SENSORS}")
    if k > 63:
        raise TooLarge(f"{k} targets; target sets are packed into 64-bit masks")
    eligible = np.asarray(eligible, dtype=bool)
    if k == 0:
        empty = np.zeros(n, dtype=bool)
        return OracleResult(0, empty, RelayPlan(n))

    routes = compute_routes(graph, eligible)
    # monitors without a route can only make a set infeasible, so they are never enumerated
    usable = np.flatnonzero(eligible & routes.routable)
    u = len(usable)

    target_mask = np.zeros(u, dtype=np.int64)
    active_mask = np.zeros(u, dtype=np.int64)
    for i, s in enumerate(usable.tolist()):
        target_mask[i] = sum(1 << int(t) for t in np.flatnonzero(covers[s]))
        active_mask[i] = sum(1 << v for v in routes.path(s)[:-1])

    # subset-indexed tables built by doubling: subsets with bit i are those without it plus i
    cover = np.zeros(1 << u, dtype=np.int64)
    active = np.zeros(1 << u, dtype=np.int64)
    for i in range(u):
        half = 1 << i
        cover[half:2 * half] = cover[:half] | target_mask[i]
        active[half:2 * half] = active[:half] | active_mask[i]

    feasible = np.flatnonzero(cover == (1 << k) - 1)
    if feasible.size == 0:
        return OracleResult(None, None, None)
    counts = np.bitwise_count(active[feasible])
    best = feasible[counts == counts.min()]

    chromosomes = []
    for sub in best.tolist():
        bits = np.zeros(n, dtype=bool)
        bits[usable[[i for i in range(u) if sub >> i & 1]]] = True
        chromosomes.append(bits)
    witness = min(chromosomes, key=lambda b: tuple(b.tolist()))
    return OracleResult(int(counts.min()), witness, build_plan(routes, np.flatnonzero(witness)))
