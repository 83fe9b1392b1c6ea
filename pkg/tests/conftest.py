import numpy as np
import pytest

from wsnsa.model import Network, NetworkConfig

CRITERIA: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in CRITERIA:
            terminalreporter.write_line(line)


@pytest.fixture
def record_criterion():
    def record(number: int, ok: bool, detail: str):
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        CRITERIA.append(line)
        print(line)
        return ok

    return record


def small_network(rng: np.random.Generator, n: int, m: int, k: int, side: float) -> Network:
    return Network.from_positions(
        rng.uniform(0, side, (n, 2)), rng.uniform(0, side, (m, 2)), rng.uniform(0, side, (k, 2)))


@pytest.fixture
def fast_config():
    """A small scenario with a short annealing schedule, for end-to-end tests."""
    return NetworkConfig(area_side=200.0, n_sensors=40, n_supernodes=4, n_targets=5,
                         e_init_sensor=0.01).with_(inner_iters=10, max_stall=20)


def oracle_gap_instances(count: int, first_seed: int = 0, n: int = 15, m: int = 2, k: int = 4,
                         side: float = 180.0):
    """Yield (seed, greedy, anneal, optimum) active counts for the first ``count`` feasible draws."""
    from wsnsa.annealing import anneal, build_context, greedy_seed
    from wsnsa.coverage import build_comm_graph, build_coverage
    from wsnsa.energy import EnergyModel
    from wsnsa.oracle import min_cover_bruteforce

    cfg = NetworkConfig(area_side=side, n_sensors=n, n_supernodes=m, n_targets=k)
    model = EnergyModel.from_config(cfg)
    seed, found = first_seed, 0
    while found < count:
        rng = np.random.default_rng(seed)
        net = small_network(rng, n, m, k, side)
        cov, graph = build_coverage(net, cfg), build_comm_graph(net, cfg)
        eligible = np.ones(n, dtype=bool)
        best = min_cover_bruteforce(cov, graph, eligible)
        if best.feasible:
            ctx = build_context(net, cov, graph, eligible, model, cfg.weights)
            start = greedy_seed(cov, eligible & ctx.routable, net.sensor_energy)
            bits = anneal(start, cfg.sa, ctx, rng)
            yield seed, len(ctx.plan(start).active), len(ctx.plan(bits).active), best.optimum
            found += 1
        seed += 1
