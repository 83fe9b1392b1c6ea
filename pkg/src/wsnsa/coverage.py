"""Target coverage, the communication graph and relay routing to super nodes.

Graph vertex ids: sensors are ``0..N-1``, super node ``s`` is vertex ``N + s``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from .energy import EnergyModel, rx_energy
from .model import Network, NetworkConfig, pairwise_distances


class NoRoute(LookupError):
    """No super node is reachable from a monitor through eligible sensors."""

    def __init__(self, monitor: int):
        super().__init__(f"sensor {monitor} has no route to a super node")
        self.monitor = monitor


@dataclass(frozen=True)
class CoverageTable:
    covers: np.ndarray  # (N, K) bool

    @property
    def m(self) -> np.ndarray:
        return self.covers.sum(axis=1)

    @property
    def targets_of(self) -> list[list[int]]:
        return [list(np.flatnonzero(row)) for row in self.covers]

    @property
    def coverers_of(self) -> list[list[int]]:
        return [list(np.flatnonzero(col)) for col in self.covers.T]

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """Row pointer and target index arrays of ``covers`` in compressed-row form."""
        rows, cols = np.nonzero(self.covers)
        ptr = np.zeros(len(self.covers) + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=len(self.covers)), out=ptr[1:])
        return ptr, cols.astype(np.int64)


def build_coverage(network: Network, config: NetworkConfig) -> CoverageTable:
    d = pairwise_distances(network.sensor_pos, network.target_pos)
    return CoverageTable(covers=d <= config.r_sense)


@dataclass(frozen=True)
class CommGraph:
    """Undirected unit-disk graph over sensors and live super nodes.

    ``adj[u, v]`` holds iff the two vertices are distinct, closer than r_comm and
    neither is a depleted super node. ``dist`` is kept for every pair.
    """

    n_sensors: int
    dist: np.ndarray
    adj: np.ndarray
    super_alive: np.ndarray
    r_comm: float

    @property
    def n_vertices(self) -> int:
        return len(self.dist)

    @property
    def n_supernodes(self) -> int:
        return self.n_vertices - self.n_sensors

    def is_super(self, v: int) -> bool:
        return v >= self.n_sensors

    def edges(self):
        """Yield ``(u, v, length)`` for every edge with ``u < v``."""
        us, vs = np.nonzero(np.triu(self.adj, 1))
        for u, v in zip(us.tolist(), vs.tolist()):
            yield u, v, float(self.dist[u, v])

    def neighbors(self, v: int) -> list[int]:
        return np.flatnonzero(self.adj[v]).tolist()

    def with_super_alive(self, alive: np.ndarray) -> "CommGraph":
        alive = np.asarray(alive, dtype=bool)
        if np.array_equal(alive, self.super_alive):
            return self
        return replace(self, adj=_adjacency(self.dist, self.n_sensors, alive, self.r_comm),
                       super_alive=alive.copy())


def _adjacency(dist, n_sensors, super_alive, r_comm):
    adj = dist < r_comm
    np.fill_diagonal(adj, False)
    dead = n_sensors + np.flatnonzero(~super_alive)
    adj[dead, :] = False
    adj[:, dead] = False
    return adj


def super_alive_mask(network: Network, model: EnergyModel) -> np.ndarray:
    """A super node stays in the graph while it can still receive one packet."""
    return network.super_energy >= rx_energy(model, model.packet_bits)


def build_comm_graph(network: Network, config: NetworkConfig) -> CommGraph:
    pos = np.vstack([network.sensor_pos, network.super_pos])
    dist = pairwise_distances(pos, pos)
    alive = super_alive_mask(network, EnergyModel.from_config(config))
    return CommGraph(
        n_sensors=network.n_sensors,
        dist=dist,
        adj=_adjacency(dist, network.n_sensors, alive, config.r_comm),
        super_alive=alive,
        r_comm=config.r_comm,
    )


@dataclass(frozen=True)
class RouteTable:
    """Best route from every sensor to a super node, for one eligibility mask.

    Routes are ranked by hop count, then total length, then the id of the super
    node reached, then the vertex-id sequence. All four keys are consistent with
    sub-path optimality, so each sensor only stores its next hop.
    """

    n_sensors: int
    next_hop: np.ndarray  # vertex id, -1 when unroutable
    hops: np.ndarray  # -1 when unroutable
    length: np.ndarray  # inf when unroutable
    super_id: np.ndarray  # -1 when unroutable
    dist: np.ndarray

    @property
    def routable(self) -> np.ndarray:
        return self.hops > 0

    def path(self, monitor: int) -> tuple[int, ...]:
        if self.hops[monitor] <= 0:
            raise NoRoute(monitor)
        path = [monitor]
        v = monitor
        while v < self.n_sensors:
            v = int(self.next_hop[v])
            path.append(v)
        return tuple(path)

    def hop_lengths(self, path) -> tuple[float, ...]:
        return tuple(float(self.dist[a, b]) for a, b in zip(path, path[1:]))


def compute_routes(graph: CommGraph, eligible: np.ndarray) -> RouteTable:
    """Label every eligible sensor with its best route, layer by layer outward from the super nodes."""
    n = graph.n_sensors
    nv = graph.n_vertices
    eligible = np.asarray(eligible, dtype=bool)
    next_hop = np.full(n, -1, dtype=np.int64)
    hops = np.full(n, -1, dtype=np.int64)
    length = np.full(n, np.inf)
    super_id = np.full(n, -1, dtype=np.int64)

    # labels over all vertices; super nodes are the zero-hop layer
    v_length = np.full(nv, np.inf)
    v_super = np.full(nv, -1, dtype=np.int64)
    frontier = n + np.flatnonzero(graph.super_alive)
    v_length[frontier] = 0.0
    v_super[frontier] = frontier - n

    unvisited = eligible.copy()
    adj_s = graph.adj[:n]
    layer = 0
    while frontier.size:
        layer += 1
        reach = adj_s[:, frontier]
        cand = np.flatnonzero(unvisited & reach.any(axis=1))
        if cand.size == 0:
            break
        link = reach[cand]
        cost = np.where(link, graph.dist[np.ix_(cand, frontier)] + v_length[frontier], np.inf)
        best = cost.min(axis=1)
        tied = cost == best[:, None]
        tie_key = np.where(tied, v_super[frontier] * nv + frontier, np.iinfo(np.int64).max)
        pick = frontier[tie_key.argmin(axis=1)]

        next_hop[cand] = pick
        hops[cand] = layer
        length[cand] = best
        super_id[cand] = v_super[pick]
        v_length[cand] = best
        v_super[cand] = v_super[pick]
        unvisited[cand] = False
        frontier = cand

    return RouteTable(n, next_hop, hops, length, super_id, graph.dist)


def relay_route(graph: CommGraph, monitor: int, eligible: np.ndarray) -> tuple[int, ...]:
    """Fewest-hop path from ``monitor`` to a super node through eligible relays.

    Raises ``NoRoute`` when no live super node can be reached.
    """
    return compute_routes(graph, eligible).path(monitor)


@dataclass(frozen=True)
class RelayPlan:
    """Paths from every monitor of a round to the super node that receives its data."""

    n_sensors: int
    paths: dict[int, tuple[int, ...]] = field(default_factory=dict)
    hop_lengths: dict[int, tuple[float, ...]] = field(default_factory=dict)

    @property
    def monitors(self) -> list[int]:
        return sorted(self.paths)

    @property
    def relays(self) -> list[int]:
        """Sensors interior to any path. May include monitors that also forward."""
        return sorted({v for p in self.paths.values() for v in p[1:-1]})

    @property
    def active(self) -> list[int]:
        return sorted(set(self.paths) | set(self.relays))

    def reached_super(self, monitor: int) -> int:
        return self.paths[monitor][-1] - self.n_sensors


def build_plan(routes: RouteTable, monitors) -> RelayPlan:
    paths, lengths = {}, {}
    for m in sorted(int(m) for m in monitors):
        p = routes.path(m)
        paths[m] = p
        lengths[m] = routes.hop_lengths(p)
    return RelayPlan(routes.n_sensors, paths, lengths)


def is_feasible(active: np.ndarray, coverage: CoverageTable, graph: CommGraph,
                eligible: np.ndarray) -> tuple[bool, str | None]:
    """Check full target coverage and super-node reachability of ``active``.

    Returns ``(ok, diagnostic)``; the diagnostic names the first uncovered target
    or, failing that, the first monitor that cannot reach a super node.
    """
    active = np.asarray(active, dtype=bool)
    covered = coverage.covers[active].any(axis=0)
    missing = np.flatnonzero(~covered)
    if missing.size:
        return False, f"target {int(missing[0])} is not covered"
    eligible = np.asarray(eligible, dtype=bool)
    routes = compute_routes(graph, eligible)
    for m in np.flatnonzero(active).tolist():
        if not eligible[m]:
            return False, f"monitor {m} is not eligible"
        if not routes.routable[m]:
            return False, f"monitor {m} has no route to a super node"
    return True, None
