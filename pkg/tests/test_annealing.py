import math

import numpy as np
import pytest

from conftest import oracle_gap_instances
from wsnsa.annealing import (Uncoverable, accept, anneal, anneal_stats, build_context,
                             contest_select, greedy_seed, move_for, neighbor, objective,
                             random_seed, temperatures, waiting_times)
from wsnsa.coverage import build_comm_graph, build_coverage
from wsnsa.energy import EnergyModel, eligibility_threshold
from wsnsa.model import Network, NetworkConfig, ObjectiveWeights, SAParams

CFG = NetworkConfig(area_side=400, n_sensors=10, n_supernodes=2, n_targets=2)
MODEL = EnergyModel()
THR = eligibility_threshold(MODEL, CFG)
ALL3 = np.ones(3, bool)


def test_move_swap_example():
    assert move_for(np.array([1, 0, 1], bool), 1, 2, ALL3).tolist() == [True, True, False]


def test_move_equal_bits_flips_first():
    c = np.array([0, 0, 1], bool)
    assert move_for(c, 1, 0, ALL3).tolist() == [False, True, True]
    c = np.array([1, 1, 0], bool)
    assert move_for(c, 0, 1, ALL3).tolist() == [False, True, False]


def test_move_blocked_by_eligibility():
    c = np.array([1, 0, 0], bool)
    out = move_for(c, 0, 1, np.array([True, False, True]))
    assert out.tolist() == c.tolist()


def test_neighbor_changes_one_or_two_bits():
    rng = np.random.default_rng(0)
    c = rng.random(30) < 0.5
    elig = np.ones(30, bool)
    for _ in range(500):
        d = neighbor(c, elig, rng)
        assert len(d) == len(c)
        changed = np.count_nonzero(d != c)
        assert changed in (1, 2)
        if changed == 2:
            assert d.sum() == c.sum()  # a swap keeps the ones-count


def test_neighbor_never_selects_ineligible():
    rng = np.random.default_rng(1)
    elig = np.arange(20) % 3 != 0
    c = np.zeros(20, bool)
    for _ in range(2000):
        c = neighbor(c, elig, rng)
        assert not (c & ~elig).any()


def test_neighbor_gives_up_when_stuck():
    c = np.array([0, 0], bool)
    assert neighbor(c, np.zeros(2, bool), np.random.default_rng(0)).tolist() == [False, False]


def test_random_seed_properties():
    assert not random_seed(np.random.default_rng(0), 8, np.zeros(8, bool)).any()
    a = random_seed(np.random.default_rng(5), 50, np.ones(50, bool))
    b = random_seed(np.random.default_rng(5), 50, np.ones(50, bool))
    assert np.array_equal(a, b)


def test_random_seed_binomial_mean():
    rng, n = np.random.default_rng(2), 40
    counts = [random_seed(rng, n, np.ones(n, bool)).sum() for _ in range(10_000)]
    assert abs(np.mean(counts) - n / 2) < 3 * math.sqrt(n) / 2


def test_accept_rules():
    rng = np.random.default_rng(3)
    assert all(accept(1.0, t, rng) for t in (1e-3, 1.0, 1e3) for _ in range(100))
    assert all(accept(0.0, 0.5, rng) for _ in range(100))
    rate = np.mean([accept(-2.0, 2.0, rng) for _ in range(10_000)])
    assert rate == pytest.approx(math.exp(-1), abs=0.015)


def test_temperatures_geometric():
    p = SAParams(t_init=10, cooling=0.9, t_min=0.5)
    ts = list(temperatures(p))
    assert ts[0] == 10 and ts[-1] >= 0.5 > ts[-1] * 0.9
    ratios = np.array(ts[1:]) / np.array(ts[:-1])
    assert np.all(np.diff(ts) < 0) and np.allclose(ratios, 0.9)


def cov_of(sensors, targets, supers=((50, 0),)):
    net = Network.from_positions(sensors, supers, targets)
    return net, build_coverage(net, CFG)


def test_greedy_prefers_more_targets():
    # sensor 1 sees all three targets, sensor 0 only the first
    net, cov = cov_of([(0, 0), (40, 0)], [(0, 10), (40, 10), (80, 0)])
    assert greedy_seed(cov, np.ones(2, bool)).tolist() == [False, True]


def test_greedy_single_pair():
    net, cov = cov_of([(0, 0)], [(0, 5)])
    assert greedy_seed(cov, np.ones(1, bool)).tolist() == [True]


def test_greedy_tie_breaks():
    net, cov = cov_of([(0, 0), (10, 0)], [(5, 0)])
    assert greedy_seed(cov, np.ones(2, bool)).tolist() == [True, False]
    assert greedy_seed(cov, np.ones(2, bool), np.array([0.05, 0.09])).tolist() == [False, True]


def test_greedy_uncoverable_names_target():
    net, cov = cov_of([(0, 0), (300, 300)], [(0, 5), (300, 305)])
    with pytest.raises(Uncoverable) as err:
        greedy_seed(cov, np.array([True, False]))
    assert err.value.target == 1


def ctx_for(sensors, targets, supers, weights=ObjectiveWeights(), energy=None):
    net = Network.from_positions(sensors, supers, targets)
    if energy is not None:
        net.sensor_energy[:] = energy
    cov, graph = build_coverage(net, CFG), build_comm_graph(net, CFG)
    elig = net.sensor_energy >= THR
    return build_context(net, cov, graph, elig, MODEL, weights)


def test_objective_smaller_set_scores_higher():
    ctx = ctx_for([(0, 0), (10, 0)], [(5, 0)], [(50, 0)])
    one, two = np.array([True, False]), np.array([True, True])
    assert objective(one, ctx) == objective(one.copy(), ctx)
    assert objective(one, ctx) > objective(two, ctx)


def test_objective_formula():
    # one monitor 50 m from the super node: 1 active, 0.3 mJ sent + 0.2 mJ received,
    # full reserve
    ctx = ctx_for([(0, 0)], [(5, 0)], [(50, 0)])
    assert objective(np.array([True]), ctx) == pytest.approx(-1 - 0.1 * 0.5 + 0.5, rel=1e-12)


def test_objective_counts_relays_once():
    # monitors 0 and 1 both reach the super node through relay 2
    ctx = ctx_for([(0, 0), (0, 20), (80, 10)], [(0, 5), (0, 25)], [(160, 10)])
    plan = ctx.plan(np.array([True, True, False]))
    assert plan.relays == [2]
    score = objective(np.array([True, True, False]), ctx)
    energy_mj = sum(ctx.cost[:2]) * 1e3
    assert score == pytest.approx(-3 - 0.1 * energy_mj + 0.5, rel=1e-9)


def test_objective_infeasible_below_feasible():
    ctx = ctx_for([(0, 0), (100, 0)], [(0, 5), (100, 5)], [(50, 0)])
    assert objective(np.array([True, False]), ctx) == pytest.approx(-1e6 - 1)
    assert objective(np.zeros(2, bool), ctx) == pytest.approx(-1e6 - 2)
    assert objective(np.array([True, True]), ctx) > -1e6


def test_objective_unroutable_monitor_is_infeasible():
    ctx = ctx_for([(0, 0), (300, 300)], [(0, 5)], [(50, 0)])
    assert objective(np.array([True, True]), ctx) < -1e5


def test_anneal_never_below_seed_and_deterministic():
    rng = np.random.default_rng(11)
    sensors = rng.uniform(0, 200, (25, 2))
    targets = rng.uniform(0, 200, (5, 2))
    ctx = ctx_for(sensors, targets, [(100, 100), (20, 180)])
    elig = ctx.eligible & ctx.routable
    params = SAParams(inner_iters=10, max_stall=30)
    for s in range(5):
        seed = random_seed(np.random.default_rng(s), 25, elig)
        best, score, _ = anneal_stats(seed, params, ctx, np.random.default_rng(s))
        assert score >= objective(seed, ctx) - 1e-9
        assert score == pytest.approx(objective(best, ctx), rel=1e-12)
        again = anneal(seed, params, ctx, np.random.default_rng(s))
        assert np.array_equal(best, again)


def test_anneal_stops_on_stall():
    ctx = ctx_for([(0, 0)], [(5, 0)], [(50, 0)])
    _, _, outer = anneal_stats(np.array([True]), SAParams(max_stall=7), ctx,
                               np.random.default_rng(0))
    assert outer <= 8


def test_anneal_greedy_seed_stays_feasible():
    rng = np.random.default_rng(4)
    ctx = ctx_for(rng.uniform(0, 200, (30, 2)), rng.uniform(0, 200, (6, 2)), [(100, 100)])
    seed = greedy_seed(ctx.coverage, ctx.eligible & ctx.routable)
    best = anneal(seed, SAParams(inner_iters=10), ctx, rng)
    assert objective(best, ctx) > -1e6


def test_oracle_gap_small_sample():
    rows = list(oracle_gap_instances(10))
    assert all(a <= opt + 1 for _, _, a, opt in rows)
    assert all(a >= opt for _, _, a, opt in rows)


def net_with_energy(sensors, targets, energy):
    net = Network.from_positions(sensors, [(300, 300)], targets)
    net.sensor_energy[:] = energy
    return net, build_coverage(net, CFG)


def test_contest_higher_energy_fires_first():
    net, cov = net_with_energy([(0, 0), (10, 0)], [(5, 0)], [0.05, 0.09])
    t = waiting_times(net, cov, THR, 1.0)
    assert t[1] < t[0]
    assert contest_select(net, cov, THR).tolist() == [False, True]


def test_contest_waiting_time_formula():
    net, cov = net_with_energy([(0, 0), (10, 0)], [(5, 0), (65, 0)], [0.05, 0.1])
    # m = [1, 2], m_max = 2
    t = waiting_times(net, cov, THR, 2.0)
    assert t == pytest.approx([2.0 * (0.5 * 0.5 + 0.5 * 0.5), 0.0])


def test_contest_ineligible_waits_full_round():
    net, cov = net_with_energy([(0, 0), (10, 0)], [(5, 0)], [THR / 2, 0.01])
    t = waiting_times(net, cov, THR, 1.0)
    assert t[0] == 1.0
    assert contest_select(net, cov, THR).tolist() == [False, True]


def test_contest_covered_node_stays_asleep():
    # sensor 1 fires first and covers both targets, sensor 0 then has nothing new
    net, cov = net_with_energy([(0, 0), (50, 0)], [(5, 0), (100, 0)], [0.1, 0.1])
    assert contest_select(net, cov, THR).tolist() == [False, True]


def test_contest_uncoverable():
    net, cov = net_with_energy([(0, 0)], [(5, 0)], [THR / 2])
    with pytest.raises(Uncoverable):
        contest_select(net, cov, THR)
    with pytest.raises(ValueError):
        contest_select(net, cov, THR, w=0.0)
