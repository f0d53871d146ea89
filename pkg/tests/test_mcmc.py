import math

import numpy as np
import pytest

from wiresoup import gibbs, graph, mcmc, wires


def make_chain(g, alpha=2.0, J=0.5, seed=1, m_cap=12, mix=0.5, C=0.5):
    params = gibbs.ModelParams(alpha=alpha, J=J, potential=gibbs.Factorial())
    st = mcmc.ChainSettings(seed=seed, sweeps=1, m_cap=m_cap,
                            rewire_const_C=C, link_move_mix=mix)
    return mcmc.WireChain(g, params, st)


def test_settings_validation():
    with pytest.raises(ValueError):
        mcmc.ChainSettings(seed=1, sweeps=-1)
    with pytest.raises(ValueError):
        mcmc.ChainSettings(seed=1, sweeps=1, rewire_const_C=1.5)
    with pytest.raises(ValueError):
        mcmc.ChainSettings(seed=1, sweeps=1, thinning=0)
    # C sqrt(alpha) > 1 breaks the constant-acceptance chain
    params = gibbs.ModelParams(alpha=4.0, J=0.5, potential=gibbs.Factorial())
    st = mcmc.ChainSettings(seed=1, sweeps=1, rewire_const_C=0.9)
    with pytest.raises(ValueError):
        mcmc.WireChain(graph.single_edge(), params, st)


def test_rewire_acceptance_table():
    chain = make_chain(graph.single_edge(), alpha=2.0, C=0.5)
    assert chain.acc_rewire[-1] == pytest.approx(0.5 / math.sqrt(2))
    assert chain.acc_rewire[0] == pytest.approx(0.5)
    assert chain.acc_rewire[1] == pytest.approx(0.5 * math.sqrt(2))
    # acceptance ratio of a move and its reverse is alpha^dlam
    for d in (-1, 0, 1):
        assert chain.acc_rewire[d] / chain.acc_rewire[-d] == pytest.approx(2.0**d)


def test_ghost_cycle_basis():
    assert mcmc.ghost_cycle_basis(graph.single_edge()) == []
    assert mcmc.ghost_cycle_basis(graph.path2()) == []
    sq = mcmc.ghost_cycle_basis(graph.square())
    assert sq == [(0, 1, 2, 3)]
    tri = mcmc.ghost_cycle_basis(graph.triangle())
    assert len(tri) == 1 and len(tri[0]) == 3
    # L=0 d=1 boundary: the two boundary edges form a ghost 2-cycle
    gb = graph.build_hypercubic_with_boundary(0, 1)
    assert mcmc.ghost_cycle_basis(gb) == [(0, 1)]
    # cycle space dimension: E - V_ghost + components
    g5 = graph.build_hypercubic(2, 2)
    assert len(mcmc.ghost_cycle_basis(g5)) == 40 - 25 + 1
    g44b = graph.build_box_with_boundary((4, 4))
    e_tot = g44b.n_edges_total
    assert len(mcmc.ghost_cycle_basis(g44b)) == e_tot - (16 + 1) + 1


def test_cycles_cross_interior_sites_twice():
    for g in (graph.square(), graph.build_hypercubic_with_boundary(1, 1),
              graph.build_box_with_boundary((3, 3))):
        chain = make_chain(g, J=0.3)
        for sites in chain.cycle_sites:
            for w, e1, e2 in sites:
                assert e1 != e2
                assert not g.is_boundary_vertex(w)


def test_zero_coupling_chain_stays_empty():
    chain = make_chain(graph.square(), J=0.0)
    for _ in range(500):
        chain.step()
    assert sum(chain.m) == 0 and chain.lam == 0


def test_epair_add_acceptance_from_empty():
    # empty single edge, alpha=2, Factorial: acceptance min(1, J^2)
    for J in (0.4, 0.9):
        chain = make_chain(graph.single_edge(), J=J, mix=1.0)
        rec = chain._epair_move(0, add=True)
        assert rec.delta_lambda == 1
        assert rec.log_ratio == pytest.approx(math.log(J * J), abs=1e-12)


def test_m_cap_rejections_and_parity():
    chain = make_chain(graph.single_edge(), J=2.0, m_cap=4)
    for _ in range(2000):
        chain.step()
        assert chain.m[0] <= 4
    wires.validate_links(chain.g, chain.m)
    chain.check_lambda()


def test_reversibility_log_balance():
    # pi(w) P(w->w') = pi(w') P(w'->w) on every accepted move, both families
    g = graph.build_hypercubic_with_boundary(1, 1)
    chain = make_chain(g, J=0.6, seed=3, m_cap=8)
    checked = 0
    for _ in range(6000):
        before = chain.log_weight()
        rec = chain.step()
        if rec.no_op or not rec.accepted:
            continue
        after = chain.log_weight()
        lhs = before + rec.log_sel_fwd + math.log(rec.acc_fwd)
        rhs = after + rec.log_sel_rev + math.log(rec.acc_rev)
        assert abs(lhs - rhs) < 1e-12
        checked += 1
    assert checked > 500
    chain.check_lambda()


def test_incremental_lambda_and_validity():
    for g in (graph.square(), graph.build_box_with_boundary((3, 3))):
        chain = make_chain(g, J=0.7, seed=7, m_cap=6)
        for i in range(1500):
            chain.step()
            if i % 250 == 0:
                chain.check_lambda()
                wires.validate_links(g, chain.m)
        chain.check_lambda()


def test_run_chain_deterministic_and_empty():
    g = graph.single_edge()
    params = gibbs.ModelParams(alpha=2.0, J=0.5, potential=gibbs.Factorial())
    st0 = mcmc.ChainSettings(seed=9, sweeps=0, burn_in=5)
    assert list(mcmc.run_chain(g, params, st0)) == []
    st = mcmc.ChainSettings(seed=9, sweeps=300, burn_in=10)
    a = list(mcmc.run_chain(g, params, st, observables={"m": lambda c: list(c.m)}))
    b = list(mcmc.run_chain(g, params, st, observables={"m": lambda c: list(c.m)}))
    assert a == b
    assert all(r["sum_m"] % 2 == 0 for r in a)


def test_wire_config_round_trip_through_chain():
    g = graph.square()
    chain = make_chain(g, J=0.8, seed=5, m_cap=6)
    for _ in range(400):
        chain.step()
    w = chain.wire_config()
    dec = wires.trace_loops(g, w)
    assert dec.lam == chain.lam
    # reload into a fresh chain
    chain2 = make_chain(g, J=0.8, seed=6, m_cap=6)
    chain2._load(w)
    assert chain2.lam == chain.lam
    assert chain2.m == chain.m


def test_stationarity_guard_and_alpha_one():
    g = graph.single_edge()
    with pytest.raises(ValueError):
        mcmc.stationarity_check_fixed_m(g, (10,), 2.0, 10, seed=1,
                                        pairing_space_limit=100)
    rep = mcmc.stationarity_check_fixed_m(g, (4,), 1.0, 40_000, seed=2)
    assert rep["n_states"] == 9
    assert max(rep["exact_probs"]) == pytest.approx(1 / 9)
    assert rep["tv_distance"] < 0.05


def test_stationarity_exact_law_m4():
    # the alpha^lambda law on the 9 pairings: 3 states at 4/24, 6 at 2/24
    rep = mcmc.stationarity_check_fixed_m(graph.single_edge(), (4,), 2.0,
                                          60_000, seed=3)
    probs = sorted(rep["exact_probs"])
    assert probs[:6] == pytest.approx([2 / 24] * 6)
    assert probs[6:] == pytest.approx([4 / 24] * 3)
    assert rep["tv_distance"] < 0.05


def test_functional_step_wrappers():
    g = graph.single_edge()
    params = gibbs.ModelParams(alpha=2.0, J=0.8, potential=gibbs.Factorial())
    rng = np.random.Generator(np.random.PCG64(13))
    w = wires.make_wire_config(g, (0,), {})
    for _ in range(40):
        w, rec = mcmc.link_step(g, w, params, rng)
        assert rec.kind in ("epair", "cycle")
        wires.validate_links(g, w.m)
    w4 = next(iter(wires.enumerate_pairings(g, (4,))))
    w2, rec = mcmc.rewire_step(g, w4, params, rng)
    assert rec.kind == "rewire"
    assert w2.m == w4.m  # rewires never change the link configuration
    assert rec.delta_lambda in (-1, 0, 1)


def test_debug_check_every():
    g = graph.build_hypercubic_with_boundary(1, 1)
    params = gibbs.ModelParams(alpha=2.0, J=0.6, potential=gibbs.Factorial())
    st = mcmc.ChainSettings(seed=77, sweeps=1, m_cap=8, debug_check_every=25)
    chain = mcmc.WireChain(g, params, st)
    for _ in range(500):
        chain.step()  # raises if the incremental count ever drifts
    with pytest.raises(ValueError):
        mcmc.ChainSettings(seed=1, sweeps=1, debug_check_every=-1)
