import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from graphsize import (
    Graph,
    GraphError,
    NeighbourOracle,
    SampleBatch,
    StationaryOracle,
    block_length,
    centered_estimate,
    comet,
    complete_graph,
    general_conductance,
    conductance_gadget,
    cycle,
    edge_sampling,
    edge_sampling_centered,
    estimate_n_via_walks,
    katzir_estimate,
    katzir_sample_size,
    katzir_stats,
    mixing_time_empirical,
    random_regular,
    rw_stationary_batch,
    stationary_batch,
    stationary_distribution,
    sun,
    tv_distance,
    walk_length,
)
from graphsize.estimators import REPORT_FIELDS, EstimateReport, NoCollisionError


def rng(seed=0):
    return np.random.default_rng(seed)


# ---------------------------------------------------------------------------
# collision estimator


def test_katzir_worked_example():
    b = SampleBatch.from_pairs([(1, 2), (2, 2), (1, 2)])
    s = katzir_stats(b)
    assert (s.r, s.psi1, s.psi_minus1, s.collisions) == (3, 6, 1.5, 2)
    assert katzir_estimate(b) == 3


def test_katzir_single_label():
    assert katzir_estimate(SampleBatch.from_pairs([(4, 3)] * 7)) == pytest.approx(1.0)


def test_katzir_no_collision():
    b = SampleBatch.from_pairs([(1, 2), (2, 2)])
    with pytest.raises(NoCollisionError) as info:
        katzir_estimate(b)
    assert info.value.batch is b


def test_katzir_rejects_zero_degree():
    with pytest.raises(ValueError):
        SampleBatch.from_pairs([(1, 0), (1, 0)])


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.integers(1, 6), st.integers(1, 9)), min_size=2, max_size=40))
def test_katzir_identity(pairs):
    # one degree per label, as an oracle would report
    deg = {}
    pairs = [(l, deg.setdefault(l, d)) for l, d in pairs]
    b = SampleBatch.from_pairs(pairs)
    s = katzir_stats(b)
    if s.collisions == 0:
        return
    assert katzir_estimate(b) * s.collisions == pytest.approx(s.psi1 * s.psi_minus1 - s.r)


def test_katzir_k8_mean():
    g = complete_graph(8)
    r = rng(1)
    ests = []
    for _ in range(500):
        o = StationaryOracle(g, r)
        ests.append(katzir_estimate(stationary_batch(o, 200)))
    assert abs(np.mean(ests) - 8) <= 0.8


def test_sample_size_examples():
    assert katzir_sample_size(1, 1, 1.0, 1.0) == 33
    assert katzir_sample_size(0.5, 0.5, 1 / math.sqrt(8), 7) == 1793


@given(st.floats(0.01, 1), st.floats(0.01, 1), st.floats(0.01, 1), st.floats(1, 50), st.floats(0.01, 1))
def test_sample_size_monotone_in_epsilon(e1, delta, norm, davg, shrink):
    e2 = e1 * shrink
    assert katzir_sample_size(e2, delta, norm, davg) >= katzir_sample_size(e1, delta, norm, davg)


@pytest.mark.parametrize("eps,delta", [(0, 0.5), (1.5, 0.5), (0.5, 0), (0.5, 2)])
def test_sample_size_range(eps, delta):
    with pytest.raises(ValueError):
        katzir_sample_size(eps, delta, 0.5, 2)


def test_batch_extend():
    a = SampleBatch.from_pairs([(1, 2)])
    b = a.extend(SampleBatch.from_pairs([(1, 2), (2, 3)]))
    assert b.r == 3
    assert b.samples == [(1, 2), (1, 2), (2, 3)]


# ---------------------------------------------------------------------------
# random-walk sampling


def test_walk_length():
    assert walk_length(5, 100) == math.ceil(2 * 5 * math.log(100))
    assert walk_length(3, 1) == walk_length(3, 2)


def test_rw_batch_k2_symmetric():
    b = rw_stationary_batch(NeighbourOracle(complete_graph(2), rng=rng(2)), 5, 100, rng(3))
    hits = np.sum(b.labels == 1)
    assert abs(hits - 50) <= 3 * 5


def test_rw_batch_c8_close_to_stationary():
    g = cycle(8)
    T = mixing_time_empirical(g)
    s = 10_000
    o = NeighbourOracle(g, rng=rng(4), record=False)
    b = rw_stationary_batch(o, T, s, rng(5))
    # labels are a relabelling, so compare sorted frequencies to sorted pi
    freq = np.sort(np.bincount(b.labels, minlength=9)[1:] / s)
    pi = np.sort(stationary_distribution(g).probs)
    assert tv_distance(freq, pi) <= 0.05


def test_rw_batch_query_bound():
    g = sun(6)
    T, s = 4, 300
    o = NeighbourOracle(g, rng=rng(6))
    rw_stationary_batch(o, T, s, rng(7))
    assert o.queries_used <= 2 * s * walk_length(T, s) + s


def test_rw_batch_isolated_start():
    g = Graph(2, ())
    with pytest.raises(GraphError):
        rw_stationary_batch(NeighbourOracle(g, rng=rng()), 2, 10, rng())


def test_walk_estimate_sun40():
    g = sun(40)
    T = mixing_time_empirical(g)
    good = 0
    for seed in range(100):
        o = NeighbourOracle(g, rng=rng(seed), init="uniform")
        try:
            est = estimate_n_via_walks(o, T, 0.3, 0.3, rng(10_000 + seed)).estimate
        except NoCollisionError:
            continue
        good += abs(est - 80) <= 24
    assert good >= 70


def test_walk_estimate_regular():
    g = random_regular(8, 500, rng(8))
    T = mixing_time_empirical(g)
    good = 0
    for seed in range(100):
        o = NeighbourOracle(g, rng=rng(seed), init="uniform")
        try:
            est = estimate_n_via_walks(o, T, 0.3, 0.3, rng(20_000 + seed)).estimate
        except NoCollisionError:
            continue
        good += abs(est - 500) <= 150
    assert good >= 70


def test_walk_estimate_deterministic():
    g = sun(10)

    def once():
        o = NeighbourOracle(g, rng=rng(1))
        return estimate_n_via_walks(o, 6, 0.5, 0.5, rng(2))

    assert once() == once()


def test_walk_estimate_counts_pilot_queries():
    g = sun(10)
    o = NeighbourOracle(g, rng=rng(1))
    res = estimate_n_via_walks(o, 6, 0.5, 0.5, rng(2))
    assert res.queries == o.queries_used
    assert res.r > 100


# ---------------------------------------------------------------------------
# EdgeSampling


def directed_cycle(n):
    return Graph(n, tuple((i, (i + 1) % n) for i in range(n)), directed=True)


def query_cap(g, ell, phi):
    # the pool holds adjacency slots, so an undirected edge counts twice
    arcs = int(g.out_degrees().sum())
    return min(2 * (2 * g.n + ell) / phi, arcs)


def check_run(run, g, ell, phi):
    assert run.estimate <= g.n
    assert run.queries_used <= query_cap(g, ell, phi) + 1e-9
    assert len(set(run.queried)) == len(run.queried)
    steps = np.diff(run.counter_trace)
    assert set(steps.tolist()) <= {-1, 1}
    assert [s == -1 for s in steps] == run.new_node_blocks


def test_block_length():
    assert block_length(1) == 2
    assert block_length(0.3) == 7
    assert block_length(2 / 3) == 3


def test_edge_sampling_directed_cycle():
    g = directed_cycle(5)
    for seed in range(20):
        run = edge_sampling(NeighbourOracle(g, "out-only", rng(seed)), 1, 1.0, rng(seed))
        assert run.estimate == 5
        assert run.queries_used <= 5
        check_run(run, g, 1, 1.0)


def test_edge_sampling_comet():
    g = comet(20, 4)
    phi = general_conductance(g, 0.25).phi
    ok = 0
    for seed in range(200):
        run = edge_sampling(NeighbourOracle(g, "out-only", rng(seed)), 10, phi, rng(seed + 1))
        check_run(run, g, 10, phi)
        ok += 15 <= run.estimate <= 20
    assert ok >= 199


@pytest.mark.parametrize(
    "make,kind",
    [
        (lambda: sun(6), "undirected"),
        (lambda: cycle(9), "undirected"),
        (lambda: comet(12, 3), "out+indeg"),
        (lambda: directed_cycle(7), "bidirectional"),
        (lambda: random_regular(3, 16, rng(1)), "undirected"),
    ],
)
@pytest.mark.parametrize("phi", [1.0, 0.5, 0.3, 0.1])
def test_edge_sampling_invariants(make, kind, phi):
    g = make()
    for seed in range(15):
        run = edge_sampling(NeighbourOracle(g, kind, rng(seed)), 3, phi, rng(seed))
        check_run(run, g, 3, phi)


def test_edge_sampling_empty_pool_finishes():
    g = Graph(1, ())
    run = edge_sampling(NeighbourOracle(g, rng=rng()), 5, 0.5, rng())
    assert run.estimate == 1 and run.queries_used == 0


def test_edge_sampling_budget():
    g = comet(20, 4)
    run = edge_sampling(NeighbourOracle(g, "out-only", rng(), budget=6), 10, 0.1, rng())
    assert run.budget_exhausted
    assert run.queries_used == 5
    assert run.estimate <= 6


def test_edge_sampling_argument_checks():
    o = NeighbourOracle(cycle(4), rng=rng())
    with pytest.raises(ValueError):
        edge_sampling(o, 0, 0.5, rng())
    with pytest.raises(ValueError):
        edge_sampling(o, 1, 0, rng())


def test_centered_formula():
    n = 60
    assert centered_estimate(n, 0.5) == pytest.approx(4 * n / 3)
    assert abs(n - centered_estimate(n, 0.5)) == pytest.approx(0.5 / 1.5 * n)
    low = centered_estimate(0.5 * n, 0.5)
    assert low == pytest.approx(2 * n / 3)
    assert abs(n - low) == pytest.approx(n / 3)


def test_centered_comet():
    g = comet(20, 4)
    phi = general_conductance(g, 0.25).phi
    ok = 0
    for seed in range(200):
        est = edge_sampling_centered(NeighbourOracle(g, "out-only", rng(seed)), 10, phi, 0.25, rng(seed + 1))
        ok += abs(20 - est) <= 0.25 / 1.75 * 20
    assert ok >= 199


def test_gadget_hidden_component_rarely_found():
    found = 0
    trials = 150
    for seed in range(trials):
        pair = conductance_gadget(24, 1 / 3, 0.5, 0.0, rng(seed))
        n1 = pair.n_true[0]
        # budget far below n/phi
        budget = 6
        o = NeighbourOracle(pair.g_prime, rng=rng(seed), budget=budget)
        run = edge_sampling(o, 10, 1 / 3, rng(seed + 1))
        found += any(v >= n1 for v in o.disclosed)
    assert found <= trials / 3


# ---------------------------------------------------------------------------
# reports


def test_report_row():
    rep = EstimateReport("katzir", "sun(n=4)", 7, {"r": 10, "epsilon": 0.3}, 8.5, 10, None)
    row = rep.to_row()
    assert len(row) == len(REPORT_FIELDS)
    assert row == ["katzir", "sun(n=4)", "7", '{"epsilon":0.3,"r":10}', "8.5", "10", ""]
    assert EstimateReport("x", "g", 0, {}, None, 3, 0.25).to_row()[4:] == ["", "3", "0.250000"]
