import math

import numpy as np
import pytest

from wiresoup import graph, observables as obs, wires


def first_pairing(g, m):
    return next(iter(wires.enumerate_pairings(g, m)))


def test_set_partition_basics():
    X = obs.SetPartition.of({1, 2}, {3})
    assert not X.is_even()
    assert obs.SetPartition.of({1, 2}, {3, 4}).is_even()
    with pytest.raises(ValueError):
        obs.SetPartition.of({1, 2}, {2, 3})
    with pytest.raises(ValueError):
        obs.SetPartition.of({1, 3})  # ground set must be {1..k}


def test_partition_enumeration_counts():
    assert sum(1 for _ in obs.enumerate_set_partitions(4)) == 15  # Bell(4)
    assert sum(1 for _ in obs.enumerate_even_partitions(2)) == 1
    assert sum(1 for _ in obs.enumerate_even_partitions(4)) == 4
    assert sum(1 for _ in obs.enumerate_set_partitions(0)) == 1


def test_loop_partition():
    g = graph.single_edge()
    empty = wires.trace_loops(g, wires.make_wire_config(g, (0,), {}))
    lp = obs.loop_partition(empty)
    assert lp.lengths == () and lp.V == 0 and lp.normalized == ()

    sq = graph.square()
    lp = obs.loop_partition(wires.trace_loops(sq, first_pairing(sq, (1, 1, 1, 1))))
    assert lp.lengths == (4,) and lp.V == 4 and lp.normalized == (1.0,)

    for w in wires.enumerate_pairings(g, (4,)):
        dec = wires.trace_loops(g, w)
        if dec.lam == 2:
            lp = obs.loop_partition(dec)
            assert lp.lengths == (2, 2)
            assert lp.normalized == (0.5, 0.5)
            break

    # normalised entries sum to 1 whenever V > 0
    for w in wires.enumerate_pairings(sq, (2, 2, 2, 2)):
        lp = obs.loop_partition(wires.trace_loops(sq, w))
        assert sum(lp.normalized) == pytest.approx(1.0)


def test_induced_partition():
    sq = graph.square()
    w = first_pairing(sq, (1, 1, 1, 1))
    X = obs.induced_partition(sq, w, [(0, 1), (2, 1)])
    assert X == obs.SetPartition.of({1, 2})
    assert obs.induced_partition(sq, w, [(0, 1)]) == obs.SetPartition.of({1})
    # undefined point: q exceeds n_x
    assert obs.induced_partition(sq, w, [(0, 2), (2, 1)]) is None

    # two disjoint 2-loops
    g2 = graph.from_edge_list(4, [(0, 1), (2, 3)])
    w2 = next(iter(wires.enumerate_pairings(g2, (2, 2))))
    X2 = obs.induced_partition(g2, w2, [(0, 1), (2, 1)])
    assert X2 == obs.SetPartition.of({1}, {2})

    with pytest.raises(ValueError):
        obs.induced_partition(sq, w, [(0, 1), (0, 1)])


def test_even_corr_examples():
    g = graph.single_edge()
    w = first_pairing(g, (2,))
    assert obs.even_corr_estimator(g, w, (0, 1)) == pytest.approx(0.25)
    w0 = wires.make_wire_config(g, (0,), {})
    assert obs.even_corr_estimator(g, w0, (0, 1)) == 0.0

    g2 = graph.from_edge_list(4, [(0, 1), (2, 3)])
    w2 = next(iter(wires.enumerate_pairings(g2, (2, 2))))
    assert obs.even_corr_estimator(g2, w2, (0, 2)) == 0.0


def test_per_partition_and_partition_of_unity():
    sq = graph.square()
    X_pair = obs.SetPartition.of({1, 2})
    X_single = obs.SetPartition.of({1}, {2})
    for m in [(1, 1, 1, 1), (2, 2, 2, 2), (2, 2, 0, 0)]:
        for w in wires.enumerate_pairings(sq, m):
            sites = (0, 2)
            total = 0.0
            for X in obs.enumerate_set_partitions(2):
                v, _c = obs.per_partition_estimator(sq, w, sites, X)
                total += v
            occ = [wires.local_occupancy(sq, m, x) for x in sites]
            if all(occ):
                expect = math.prod(o / (o + 1.0) for o in occ)
                assert total == pytest.approx(expect)
            # sum over even partitions equals the even estimator, exactly
            even_sum = obs.per_partition_estimator(sq, w, sites, X_pair)[0]
            assert even_sum == pytest.approx(
                obs.even_corr_estimator(sq, w, sites), abs=1e-14)
            assert X_single.is_even() is False

    with pytest.raises(ValueError):
        obs.per_partition_estimator(sq, first_pairing(sq, (1, 1, 1, 1)),
                                    (0, 2), obs.SetPartition.of({1, 2}, {3}))


def test_even_decomposition_identity_2k4():
    # even_corr = sum over even X of per-partition estimators, k = 2 (4 sites)
    sq = graph.square()
    rng = np.random.Generator(np.random.PCG64(21))
    sites = (0, 1, 2, 3)
    for m in [(1, 1, 1, 1), (2, 2, 2, 2), (3, 1, 1, 3), (3, 3, 1, 1)]:
        for _ in range(3):
            w = wires.sample_uniform_pairing(sq, m, rng)
            even_sum = sum(
                obs.per_partition_estimator(sq, w, sites, X)[0]
                for X in obs.enumerate_even_partitions(4)
            )
            val = obs.even_corr_estimator(sq, w, sites)
            assert even_sum == pytest.approx(val, abs=1e-14)
            assert 0.0 <= val <= 1.0


def test_singleton_block_zero_case():
    # single edge m=2: every pair at site 0 shares its loop with site 1, so the
    # all-singletons partition never occurs
    g = graph.single_edge()
    w = first_pairing(g, (2,))
    v, c = obs.per_partition_estimator(g, w, (0, 1), obs.SetPartition.of({1}, {2}))
    assert v == 0.0 and c == 0


def test_estimator_bounds():
    sq = graph.square()
    rng = np.random.Generator(np.random.PCG64(5))
    for m in [(2, 2, 2, 2), (4, 2, 2, 4)]:
        for _ in range(5):
            w = wires.sample_uniform_pairing(sq, m, rng)
            v = obs.even_corr_estimator(sq, w, (0, 2))
            assert 0.0 <= v <= 1.0


def test_tilde_m_estimator():
    vals = [0.0, 0.5, 0.25, 0.5] * 64
    mean, err = obs.tilde_m_estimator(vals)
    assert mean == pytest.approx(np.mean(vals))
    assert err >= 0.0


def test_lmax_survival():
    surv = obs.lmax_survival([0, 0, 0, 2, 3], n_max=4)
    assert surv["p"] == [2 / 5, 2 / 5, 1 / 5, 0.0]
    assert all(a >= b for a, b in zip(surv["p"], surv["p"][1:]))
    assert all(0 <= lo <= p or p == 0.0
               for lo, p in zip(surv["lower"], surv["p"]))
    zero = obs.lmax_survival([0] * 10, n_max=3)
    assert zero["p"] == [0.0, 0.0, 0.0]


def test_cutoff_length():
    assert obs.cutoff_length(1, 2) == 3
    vals = [obs.cutoff_length(L, 2) for L in range(1, 30)]
    assert all(a <= b for a, b in zip(vals, vals[1:]))
    assert vals[-1] > vals[0]
    assert obs.cutoff_length(200, 2) / (401**2) < 0.01
    with pytest.raises(ValueError):
        obs.cutoff_length(0, 2)


def test_splashing_sites():
    g = graph.build_hypercubic(2, 2)
    s2 = obs.splashing_sites(g, 2)
    assert {g.coords[v] for v in s2} == {(-2, -2), (2, 2)}
    s4 = obs.splashing_sites(g, 4)
    assert {g.coords[v] for v in s4} == {(-2, -2), (2, 2), (2, -2), (-2, 2)}
    with pytest.raises(ValueError):
        obs.splashing_sites(graph.single_edge(), 5)
