import math

import numpy as np
import pytest
from scipy.special import iv

from wiresoup import gibbs, graph, wires


def cfg(g, m):
    return next(iter(wires.enumerate_pairings(g, m)))


def test_log_weight_examples():
    g = graph.single_edge()
    p = gibbs.ModelParams(alpha=2.0, J=1.0, potential=gibbs.Factorial())
    w0 = wires.make_wire_config(g, (0,), {})
    assert gibbs.log_weight(g, w0, p) == 0.0
    # m=2: one loop; 2 * (1/2!) * (1/1!)^2 = 1
    assert gibbs.log_weight(g, cfg(g, (2,)), p) == pytest.approx(0.0, abs=1e-12)
    # m=4 with two loops: 2^2 / 4! / (2!)^2 = 1/24
    for w in wires.enumerate_pairings(g, (4,)):
        if wires.trace_loops(g, w).lam == 2:
            assert math.exp(gibbs.log_weight(g, w, p)) == pytest.approx(1 / 24)
            break


def test_log_weight_sentinels():
    g = graph.single_edge()
    pJ0 = gibbs.ModelParams(alpha=2.0, J=0.0, potential=gibbs.Factorial())
    assert gibbs.log_weight(g, cfg(g, (2,)), pJ0) == -math.inf
    # table potential forbidding n >= 1
    pT = gibbs.ModelParams(alpha=2.0, J=1.0, potential=gibbs.TableU([0.0]))
    assert gibbs.log_weight(g, cfg(g, (2,)), pT) == -math.inf


def test_partition_exact_closed_forms():
    g = graph.single_edge()
    for J in (0.1, 0.4, 0.8):
        p = gibbs.ModelParams(alpha=1.0, J=J, potential=gibbs.GammaN(1))
        Z, tail = gibbs.partition_exact(g, p, m_cap=24)
        assert Z == pytest.approx(math.cosh(2 * J), rel=1e-12)
        assert tail < 1e-12
        p2 = gibbs.ModelParams(alpha=2.0, J=J, potential=gibbs.Factorial())
        Z2, _ = gibbs.partition_exact(g, p2, m_cap=24)
        assert Z2 == pytest.approx(float(iv(0, 2 * J)), rel=1e-12)
    pz = gibbs.ModelParams(alpha=2.0, J=0.0)
    assert gibbs.partition_exact(g, pz, m_cap=8)[0] == 1.0


def test_partition_guard():
    g = graph.build_hypercubic(2, 2)
    with pytest.raises(ValueError):
        gibbs.partition_exact(g, gibbs.ModelParams(alpha=2.0, J=0.1), m_cap=4)


def test_gamma1_double_factorial_identity():
    # e^{-U(n)} = 2^n / (2n-1)!! for the N=1 potential, n <= 32
    pot = gibbs.GammaN(1)
    for n in range(33):
        expect = 2.0**n / wires.double_factorial(2 * n - 1)
        assert math.exp(-pot.U(n)) == pytest.approx(expect, rel=1e-10)


def test_gamma2_equals_factorial():
    g2, fac = gibbs.GammaN(2), gibbs.Factorial()
    for n in range(40):
        assert g2.U(n) == pytest.approx(fac.U(n), rel=1e-12, abs=1e-12)
    gg = graph.triangle()
    pa = gibbs.ModelParams(alpha=2.0, J=0.7, potential=g2)
    pb = gibbs.ModelParams(alpha=2.0, J=0.7, potential=fac)
    for w in wires.enumerate_pairings(gg, (1, 1, 1)):
        assert gibbs.log_weight(gg, w, pa) == pytest.approx(
            gibbs.log_weight(gg, w, pb), abs=1e-12)


def test_log_weight_additive_over_components():
    # a disjoint union of two edges: every joint configuration's log weight is
    # the sum of the per-component log weights, and Z factorises
    g2 = graph.from_edge_list(4, [(0, 1), (2, 3)])
    g1 = graph.single_edge()
    p = gibbs.ModelParams(alpha=2.0, J=0.6, potential=gibbs.Factorial())
    for ma in (0, 2, 4):
        for mb in (0, 2):
            for wa in wires.enumerate_pairings(g1, (ma,)):
                for wb in wires.enumerate_pairings(g1, (mb,)):
                    joint_pairs = {0: list(wa.pairs_at(0)), 1: list(wa.pairs_at(1))}
                    joint_pairs[2] = [(((1, pa[1]), (1, pb[1])))
                                      for pa, pb in wb.pairs_at(0)]
                    joint_pairs[3] = [(((1, pa[1]), (1, pb[1])))
                                      for pa, pb in wb.pairs_at(1)]
                    w_joint = wires.make_wire_config(g2, (ma, mb), joint_pairs)
                    expect = (gibbs.log_weight(g1, wa, p)
                              + gibbs.log_weight(g1, wb, p))
                    assert gibbs.log_weight(g2, w_joint, p) == pytest.approx(
                        expect, abs=1e-12)
    Z2, _ = gibbs.partition_exact(g2, p, m_cap=12)
    Z1, _ = gibbs.partition_exact(g1, p, m_cap=12)
    assert Z2 == pytest.approx(Z1 * Z1, rel=1e-10)


def test_certificates():
    assert gibbs.Factorial().coupling_certificate() == pytest.approx(2.0, abs=1e-9)
    assert gibbs.GammaN(1).coupling_certificate() == pytest.approx(2.0, abs=1e-9)
    assert gibbs.GammaN(3).coupling_certificate() == pytest.approx(2.0, abs=1e-9)
    # (2n-1)!!/n! <= 2^n, checked directly for n <= 64
    for n in range(1, 65):
        assert wires.double_factorial(2 * n - 1) / math.factorial(n) <= 2.0**n * (1 + 1e-12)
    assert gibbs.check_certificate(gibbs.Factorial(), 2.0)
    assert not gibbs.check_certificate(gibbs.Factorial(), 1.5)


def test_partition_upper_bound():
    g = graph.single_edge()
    p0 = gibbs.ModelParams(alpha=2.0, J=0.0, potential=gibbs.Factorial())
    b = gibbs.BoundParams.for_params(p0)
    assert gibbs.partition_upper_bound(g, p0, b) == 1.0

    p = gibbs.ModelParams(alpha=2.0, J=0.1, potential=gibbs.Factorial())
    b = gibbs.BoundParams(C=2.0, alpha_bar=p.alpha_bar)
    ub = gibbs.partition_upper_bound(g, p, b)
    assert ub == pytest.approx(math.exp(0.2 * math.sqrt(2)), rel=1e-12)
    Z, _ = gibbs.partition_exact(g, p, m_cap=16)
    assert Z <= ub

    with pytest.raises(ValueError):
        gibbs.partition_upper_bound(g, p, gibbs.BoundParams(C=1.2, alpha_bar=1.0))


def test_lmax_tail_bound():
    b = gibbs.BoundParams(C=2.0, alpha_bar=math.sqrt(2.0), eta=1.0)
    for n in (1, 5, 20):
        assert gibbs.lmax_tail_bound(2, 0.0, n, b) == pytest.approx(math.exp(-n))
    b0 = gibbs.BoundParams(C=2.0, alpha_bar=math.sqrt(2.0), eta=0.0)
    J = 0.001
    rho = 4 * math.sqrt(math.expm1(math.sqrt(2) * 2 * J))
    for n in (1, 7, 30):  # eta = 0: bound is n-independent
        assert gibbs.lmax_tail_bound(2, J, n, b0) == pytest.approx(1 / (1 - rho))
    assert gibbs.lmax_tail_bound(2, 5.0, 3, b0) == math.inf  # divergent is a value


def test_small_J_threshold():
    assert gibbs.small_J_threshold(1) == pytest.approx(2 ** -1.5 * math.log(5 / 4))
    assert gibbs.small_J_threshold(3) == pytest.approx(9.687e-3, rel=1e-3)
    vals = [gibbs.small_J_threshold(d) for d in range(1, 7)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_pressure_convex_in_logJ():
    # second differences of log Z / |V| in s = log J are nonnegative
    for g in (graph.single_edge(), graph.triangle()):
        p_of = lambda J: gibbs.partition_exact(
            g, gibbs.ModelParams(alpha=2.0, J=J, potential=gibbs.Factorial()),
            m_cap=20)[0]
        for s in (-1.5, -0.5, 0.0):
            h = 0.05
            f = [math.log(p_of(math.exp(s + k * h))) / g.n_vertices for k in (-1, 0, 1)]
            assert f[0] - 2 * f[1] + f[2] >= -1e-9


def test_exact_m_marginal_normalised():
    g = graph.single_edge()
    p = gibbs.ModelParams(alpha=2.0, J=0.5, potential=gibbs.Factorial())
    marg = gibbs.exact_m_marginal(g, p, m_cap=16)
    assert sum(marg.values()) == pytest.approx(1.0, abs=1e-12)
    assert marg[(0,)] > marg[(2,)] > marg[(4,)]


def test_correlation_sums_trivial_cases():
    g = graph.single_edge()
    p0 = gibbs.ModelParams(alpha=2.0, J=0.0, potential=gibbs.Factorial())
    assert gibbs.pair_correlation_sum(g, p0, 0, 1, 1.0, m_cap=6) == 0.0
    gb = graph.build_hypercubic_with_boundary(0, 1)
    assert gibbs.open_occupancy_sum(gb, p0, 0, 1.0, m_cap=6) == 0.0
    with pytest.raises(ValueError):
        gibbs.open_occupancy_sum(g, p0, 0, 1.0)


def test_table_potential():
    with pytest.raises(ValueError):
        gibbs.TableU([1.0, 0.0])
    t = gibbs.TableU([0.0, 0.5, 2.0])
    assert t.U(1) == 0.5
    assert t.U(7) == math.inf
    assert t.coupling_certificate() >= 1.0


def test_model_params_validation():
    with pytest.raises(ValueError):
        gibbs.ModelParams(alpha=0.0, J=1.0)
    with pytest.raises(ValueError):
        gibbs.ModelParams(alpha=1.0, J=-0.5)
    p = gibbs.ModelParams(alpha=1.0, J=(0.1, 0.2))
    g = graph.single_edge()
    with pytest.raises(ValueError):
        p.edge_J(g)
