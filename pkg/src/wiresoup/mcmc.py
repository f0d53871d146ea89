"""Markov chain Monte Carlo for wire configurations.

Two move families:

* Pairing rewires (the fixed-m chain): pick a site uniformly, pick 2 of the
  2 n_x ends uniformly, propose swapping their pairs, accept with probability
  C alpha^{+1/2} / C / C alpha^{-1/2} as the loop count goes up / stays /
  goes down.  C must satisfy C max(sqrt(alpha), 1/sqrt(alpha)) <= 1 or the
  acceptance is not a probability; the constructor rejects such settings.

* Link moves (the chain over m, which the rewire family cannot change):
  (i) edge-pair moves add or remove two links on one edge, and (ii) cycle
  moves add or remove one link on every edge of a precomputed cycle from a
  fundamental cycle basis of the graph with all boundary vertices identified
  to a single ghost vertex (on simply connected boxes this spans the same
  space as unit-plaquette moves; with a boundary it yields the
  boundary-to-boundary paths that create open trajectories).  Additions
  extend the pairing at each touched interior site by a uniformly chosen
  insertion (pair the two new ends together, or splice one into any of the
  2 n existing ends, (2n+1) choices); removals take the top copies and are
  the deterministic inverse.  Accepted by Metropolis-Hastings with the exact
  weight ratio times the insertion-count proposal correction.

Loop-count bookkeeping is incremental: a move retraces only the affected
trajectories (before the move, the pairs it breaks; after it, the links it
adds), so each step costs O(affected loop lengths) instead of O(volume).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import gibbs, wires


@dataclass(frozen=True)
class ChainSettings:
    seed: int
    sweeps: int
    burn_in: int = 0
    thinning: int = 1
    rewire_const_C: float = 0.5
    link_move_mix: float = 0.5
    m_cap: int = 16
    debug_check_every: int = 0  # > 0: revalidate lambda by a full trace every k moves

    def __post_init__(self):
        if self.sweeps < 0 or self.burn_in < 0 or self.thinning < 1:
            raise ValueError("invalid sweep counts")
        if self.debug_check_every < 0:
            raise ValueError("debug_check_every must be >= 0")
        if not 0 < self.rewire_const_C <= 1:
            raise ValueError("rewire_const_C must be in (0, 1]")
        if not 0 <= self.link_move_mix <= 1:
            raise ValueError("link_move_mix must be a probability")
        if self.m_cap < 2:
            raise ValueError("m_cap must be >= 2")


@dataclass
class MoveRecord:
    kind: str            # "rewire" | "epair" | "cycle"
    target: int          # site (rewire) or edge / cycle index
    sign: int            # +1 add, -1 remove, 0 rewire
    accepted: bool
    no_op: bool = False
    delta_lambda: int = 0
    log_ratio: float = 0.0    # full MH log ratio (weights + proposal correction)
    log_sel_fwd: float = 0.0  # log proposal probability, acceptance excluded
    log_sel_rev: float = 0.0
    acc_fwd: float = 0.0
    acc_rev: float = 0.0


def ghost_cycle_basis(g) -> list[tuple[int, ...]]:
    """Fundamental cycles (as edge-id tuples) of the boundary-identified graph.

    All boundary vertices collapse to one ghost vertex; a BFS spanning forest
    over the resulting multigraph gives one cycle per non-tree edge.
    """
    GHOST = -1
    bset = set(g.boundary_vertices)

    def node(v):
        return GHOST if v in bset else v

    adj: dict[int, list[tuple[int, int]]] = {}
    for eid, (u, v) in enumerate(g.all_edges):
        a, b = node(u), node(v)
        adj.setdefault(a, []).append((eid, b))
        adj.setdefault(b, []).append((eid, a))

    parent_edge: dict[int, int | None] = {}
    parent: dict[int, int | None] = {}
    tree_edges: set[int] = set()
    order = sorted(adj)
    for root in order:
        if root in parent:
            continue
        parent[root] = None
        parent_edge[root] = None
        queue = [root]
        while queue:
            a = queue.pop(0)
            for eid, b in sorted(adj[a]):
                if b in parent or eid in tree_edges:
                    continue
                parent[b] = a
                parent_edge[b] = eid
                tree_edges.add(eid)
                queue.append(b)

    def root_path(a) -> set[int]:
        path = set()
        while parent[a] is not None:
            path.add(parent_edge[a])
            a = parent[a]
        return path

    cycles = []
    for eid, (u, v) in enumerate(g.all_edges):
        if eid in tree_edges:
            continue
        cyc = root_path(node(u)) ^ root_path(node(v))
        cyc.add(eid)
        cycles.append(tuple(sorted(cyc)))
    return cycles


class WireChain:
    """Mutable wire-configuration sampler for one graph and parameter set."""

    def __init__(self, g, params: gibbs.ModelParams, settings: ChainSettings,
                 initial: wires.WireConfig | None = None, link_moves: bool = True):
        a = params.alpha
        C = settings.rewire_const_C
        if C * max(math.sqrt(a), 1.0 / math.sqrt(a)) > 1.0 + 1e-12:
            raise ValueError("rewire_const_C * alpha^(+-1/2) must be <= 1 "
                             "for the constant-acceptance rewire chain")
        self.g = g
        self.params = params
        self.settings = settings
        self.rng = np.random.Generator(np.random.PCG64(settings.seed))
        self._buf = np.empty(0)
        self._buf_i = 0

        self.interior = sorted(g.interior_vertices)
        self.is_interior = [False] * g.n_vertices
        for v in self.interior:
            self.is_interior[v] = True
        self.E = g.n_edges_total
        self.edge_verts = list(g.all_edges)
        self.J = params.edge_J(g)
        self.logJ = np.where(self.J > 0, np.log(np.maximum(self.J, 1e-300)), -math.inf)
        self.log_alpha = math.log(a)
        self.stride = settings.m_cap
        self._U_cache: dict[int, float] = {}

        # rewire acceptance by delta lambda
        self.acc_rewire = {-1: C * a ** -0.5, 0: C, 1: min(1.0, C * a**0.5)}

        self.catalog: list[tuple[str, int]] = []
        self.cycles: list[tuple[int, ...]] = []
        if link_moves:
            self.catalog = [("epair", e) for e in range(self.E)]
            self.cycles = ghost_cycle_basis(g)
            self.catalog += [("cycle", i) for i in range(len(self.cycles))]
        # per cycle: the interior vertices it visits with their two cycle edges
        self.cycle_sites: list[list[tuple[int, int, int]]] = []
        for cyc in self.cycles:
            touch: dict[int, list[int]] = {}
            for e in cyc:
                for w in self.edge_verts[e]:
                    if self.is_interior[w]:
                        touch.setdefault(w, []).append(e)
            sites = []
            for w, es in sorted(touch.items()):
                if len(es) != 2:
                    raise AssertionError("cycle must cross interior sites twice")
                sites.append((w, min(es), max(es)))
            self.cycle_sites.append(sites)

        self.m = [0] * self.E
        self.partner: dict[int, int] = {}
        self.ends_at: list[list[int]] = [[] for _ in range(g.n_vertices)]
        self.pos: dict[int, int] = {}
        self.n = [0] * g.n_vertices
        self.lam = 0
        self.moves = 0
        if initial is not None:
            self._load(initial)

    # -- state plumbing ------------------------------------------------------

    def _U(self, n: int) -> float:
        out = self._U_cache.get(n)
        if out is None:
            out = float(self.params.potential.U(n))
            self._U_cache[n] = out
        return out

    def _u(self) -> float:
        if self._buf_i >= len(self._buf):
            self._buf = self.rng.random(8192)
            self._buf_i = 0
        v = self._buf[self._buf_i]
        self._buf_i += 1
        return float(v)

    def _end(self, e: int, p: int, side: int) -> int:
        return ((e * self.stride) + (p - 1)) * 2 + side

    def _vertex_of(self, end: int) -> int:
        u, v = self.edge_verts[(end >> 1) // self.stride]
        return u if (end & 1) == 0 else v

    def _register_end(self, end: int) -> None:
        x = self._vertex_of(end)
        if self.is_interior[x]:
            self.pos[end] = len(self.ends_at[x])
            self.ends_at[x].append(end)

    def _unregister_end(self, end: int) -> None:
        x = self._vertex_of(end)
        if self.is_interior[x]:
            i = self.pos.pop(end)
            lst = self.ends_at[x]
            last = lst.pop()
            if last != end:
                lst[i] = last
                self.pos[last] = i

    def _pair(self, a: int, b: int) -> None:
        self.partner[a] = b
        self.partner[b] = a

    def _unpair(self, a: int) -> int:
        b = self.partner.pop(a)
        del self.partner[b]
        return b

    def _load(self, w: wires.WireConfig) -> None:
        wires.validate_links(self.g, w.m)
        if max(w.m, default=0) > self.settings.m_cap:
            raise ValueError("initial configuration exceeds m_cap")
        self.m = [int(v) for v in w.m]
        cfg_stride = wires.stride_for(w.m)
        pm = wires.partner_map(self.g, w, cfg_stride)
        self.partner = {}
        for a, b in pm.items():
            if a < b:
                ea, eb = self._recode(a, cfg_stride), self._recode(b, cfg_stride)
                self.partner[ea] = eb
                self.partner[eb] = ea
        self.ends_at = [[] for _ in range(self.g.n_vertices)]
        self.pos = {}
        for e in range(self.E):
            for p in range(1, self.m[e] + 1):
                self._register_end(self._end(e, p, 0))
                self._register_end(self._end(e, p, 1))
        for x in range(self.g.n_vertices):
            self.n[x] = len(self.ends_at[x]) // 2 if self.is_interior[x] else 0
        self.lam = wires.trace_loops_from_partner(self.g, self.m, self.partner, self.stride).lam

    def _recode(self, end: int, from_stride: int) -> int:
        link = end >> 1
        e, p0 = divmod(link, from_stride)
        return ((e * self.stride) + p0) * 2 + (end & 1)

    def wire_config(self) -> wires.WireConfig:
        pairings: dict[int, list] = {x: [] for x in self.interior}
        for a, b in self.partner.items():
            if a < b:
                x = self._vertex_of(a)
                ea = ((a >> 1) // self.stride, (a >> 1) % self.stride + 1)
                eb = ((b >> 1) // self.stride, (b >> 1) % self.stride + 1)
                pairings[x].append(tuple(sorted((ea, eb))))
        return wires.make_wire_config(self.g, self.m, pairings)

    def trace(self) -> wires.LoopDecomposition:
        return wires.trace_loops_from_partner(self.g, self.m, self.partner, self.stride)

    def check_lambda(self) -> None:
        lam = self.trace().lam
        if lam != self.lam:
            raise AssertionError(f"incremental lambda {self.lam} != traced {lam}")

    def log_weight(self) -> float:
        lw = gibbs.log_link_weight(self.g, self.m, self.params)
        return self.lam * self.log_alpha + lw

    # -- trajectory counting ---------------------------------------------------

    def _collect(self, a: int, pget) -> set[int]:
        """All ends on the trajectory containing the link of end a."""
        ends = {a, a ^ 1}
        cur = pget(a)
        while cur is not None and cur not in ends:
            ends.add(cur)
            ends.add(cur ^ 1)
            cur = pget(cur ^ 1)
        if cur is not None:
            return ends  # closed
        cur = pget(a ^ 1)
        while cur is not None and cur not in ends:
            ends.add(cur)
            ends.add(cur ^ 1)
            cur = pget(cur ^ 1)
        return ends

    def _count_groups(self, reps, pget) -> int:
        visited: set[int] = set()
        cnt = 0
        for a in reps:
            if a in visited:
                continue
            cnt += 1
            visited |= self._collect(a, pget)
        return cnt

    # -- rewire move ------------------------------------------------------------

    def rewire_step(self) -> MoveRecord:
        x = self.interior[int(self._u() * len(self.interior))]
        k = 2 * self.n[x]
        rec = MoveRecord(kind="rewire", target=x, sign=0, accepted=False, no_op=True)
        if k < 4:
            return rec  # fewer than two pairs: nothing to rewire
        i = int(self._u() * k)
        j = int(self._u() * (k - 1))
        if j >= i:
            j += 1
        ends = self.ends_at[x]
        a, b = ends[i], ends[j]
        a2 = self.partner[a]
        if a2 == b:
            return rec  # same pair selected
        b2 = self.partner[b]

        # count affected trajectories before and after; note two distinct OPEN
        # trajectories rewire into two open trajectories (no merge), so the
        # after-count is always taken honestly from the proposed pairing
        before = self._count_groups((a, b), self.partner.get)
        ov = {a: b, b: a, a2: b2, b2: a2}

        def pnew(e):
            return ov.get(e, self.partner.get(e))

        after = self._count_groups((a, a2), pnew)
        dlam = after - before
        acc = self.acc_rewire[dlam]
        rec.no_op = False
        rec.delta_lambda = dlam
        rec.acc_fwd = acc
        rec.acc_rev = self.acc_rewire[-dlam]
        sel = -math.log(len(self.interior)) + math.log(2.0) - math.log(k * (k - 1) / 2)
        rec.log_sel_fwd = sel
        rec.log_sel_rev = sel
        if self._u() < acc:
            self._pair(a, b)
            self._pair(a2, b2)
            self.lam += dlam
            rec.accepted = True
        return rec

    # -- link moves ---------------------------------------------------------------

    def _insertion_choice(self, x: int) -> int:
        """0 = pair the two new ends together; t >= 1 = splice into end t-1."""
        return int(self._u() * (2 * self.n[x] + 1))

    def link_step(self) -> MoveRecord:
        mv = self.catalog[int(self._u() * len(self.catalog))]
        add = self._u() < 0.5
        if mv[0] == "epair":
            return self._epair_move(mv[1], add)
        return self._cycle_move(mv[1], add)

    def _epair_move(self, e: int, add: bool) -> MoveRecord:
        rec = MoveRecord(kind="epair", target=e, sign=1 if add else -1,
                         accepted=False, no_op=True)
        u, v = self.edge_verts[e]
        sites = [w for w in (u, v) if self.is_interior[w]]
        if add:
            if self.m[e] + 2 > self.settings.m_cap or self.J[e] == 0.0:
                return rec
            choices = {w: self._insertion_choice(w) for w in sites}
            return self._apply_link_change(rec, [e, e], +2, {e: +2}, sites,
                                           {w: [ (e, self.m[e] + 1), (e, self.m[e] + 2) ] for w in sites},
                                           choices)
        if self.m[e] < 2:
            return rec
        return self._apply_link_change(rec, [e, e], -2, {e: -2}, sites,
                                       {w: [(e, self.m[e] - 1), (e, self.m[e])] for w in sites},
                                       None)

    def _cycle_move(self, ci: int, add: bool) -> MoveRecord:
        cyc = self.cycles[ci]
        rec = MoveRecord(kind="cycle", target=ci, sign=1 if add else -1,
                         accepted=False, no_op=True)
        if add:
            if any(self.m[e] + 1 > self.settings.m_cap or self.J[e] == 0.0 for e in cyc):
                return rec
            sites = [w for (w, _e1, _e2) in self.cycle_sites[ci]]
            new_links = {w: [(e1, self.m[e1] + 1), (e2, self.m[e2] + 1)]
                         for (w, e1, e2) in self.cycle_sites[ci]}
            choices = {w: self._insertion_choice(w) for w in sites}
            return self._apply_link_change(rec, list(cyc), +1, {e: +1 for e in cyc},
                                           sites, new_links, choices)
        if any(self.m[e] < 1 for e in cyc):
            return rec
        sites = [w for (w, _e1, _e2) in self.cycle_sites[ci]]
        old_links = {w: [(e1, self.m[e1]), (e2, self.m[e2])]
                     for (w, e1, e2) in self.cycle_sites[ci]}
        return self._apply_link_change(rec, list(cyc), -1, {e: -1 for e in cyc},
                                       sites, old_links, None)

    def _apply_link_change(self, rec: MoveRecord, edges: list[int], unit: int,
                           dm: dict[int, int], sites: list[int],
                           site_links: dict[int, list[tuple[int, int]]],
                           choices: dict[int, int] | None) -> MoveRecord:
        """Shared add/remove machinery for edge-pair and cycle moves.

        site_links[w] lists the two (edge, copy) links whose ends at w are
        created (add) or destroyed (remove), in deterministic order.
        """
        add = choices is not None

        def end_at(w, e, p):
            uu, vv = self.edge_verts[e]
            return self._end(e, p, 0 if uu == w else 1)

        # weight ratio pieces independent of the pairing surgery
        dlog = 0.0
        for e, d in dm.items():
            if d > 0:
                for step in range(d):
                    dlog += self.logJ[e] - math.log(self.m[e] + 1 + step)
            else:
                for step in range(-d):
                    dlog += -self.logJ[e] + math.log(self.m[e] - step)
        for w in sites:
            Unew = self._U(self.n[w] + (1 if add else -1))
            if math.isinf(Unew):
                return rec
            dlog += self._U(self.n[w]) - Unew

        # proposal correction from insertion counts
        log_sel_extra_fwd = 0.0
        log_sel_extra_rev = 0.0
        if add:
            for w in sites:
                log_sel_extra_fwd += -math.log(2 * self.n[w] + 1)
        else:
            for w in sites:
                log_sel_extra_rev += -math.log(2 * self.n[w] - 1)

        # pairing surgery plan
        broken: list[tuple[int, int]] = []   # pairs broken (their end ids)
        new_pairs: list[tuple[int, int]] = []
        if add:
            for w in sites:
                (e1, p1), (e2, p2) = site_links[w]
                n1, n2 = end_at(w, e1, p1), end_at(w, e2, p2)
                t = choices[w]
                if t == 0:
                    new_pairs.append((n1, n2))
                else:
                    c = self.ends_at[w][t - 1]
                    c2 = self.partner[c]
                    broken.append((c, c2))
                    new_pairs.append((n1, c))
                    new_pairs.append((n2, c2))
        else:
            for w in sites:
                (e1, p1), (e2, p2) = site_links[w]
                r1, r2 = end_at(w, e1, p1), end_at(w, e2, p2)
                broken.append((r1, self.partner[r1]))
                if self.partner[r1] != r2:
                    broken.append((r2, self.partner[r2]))
                    new_pairs.append((self.partner[r1], self.partner[r2]))

        # delta lambda by local retracing
        ov: dict[int, int | None] = {}
        for a, b in broken:
            ov[a] = None
            ov[b] = None
        for a, b in new_pairs:
            ov[a] = b
            ov[b] = a
        removed_links: set[int] = set()
        if not add:
            for w in sites:
                for e, p in site_links[w]:
                    removed_links.add(e * self.stride + (p - 1))
            # deduplicate: both endpoints list the same links for epair moves

        def pnew(end):
            if end in ov:
                return ov[end]
            return self.partner.get(end)

        if add:
            reps_after = []
            seen = set()
            for w in sites:
                for e, p in site_links[w]:
                    l = e * self.stride + (p - 1)
                    if l not in seen:
                        seen.add(l)
                        reps_after.append(l * 2)
            t_after = self._count_groups(reps_after, pnew)
            t_before = self._count_groups([a for a, _b in broken], self.partner.get)
        else:
            reps_before = []
            seen = set()
            for w in sites:
                for e, p in site_links[w]:
                    l = e * self.stride + (p - 1)
                    if l not in seen:
                        seen.add(l)
                        reps_before.append(l * 2)
            t_before = self._count_groups(reps_before, self.partner.get)
            t_after = self._count_groups([a for a, _b in new_pairs], pnew) if new_pairs else 0
        dlam = t_after - t_before

        log_ratio = dlog + dlam * self.log_alpha + log_sel_extra_rev - log_sel_extra_fwd
        acc = math.exp(log_ratio) if log_ratio < 0 else 1.0
        rec.no_op = False
        rec.delta_lambda = dlam
        rec.log_ratio = log_ratio
        base_sel = -math.log(len(self.catalog)) - math.log(2.0)
        rec.log_sel_fwd = base_sel + log_sel_extra_fwd
        rec.log_sel_rev = base_sel + log_sel_extra_rev
        rec.acc_fwd = acc
        rec.acc_rev = math.exp(-log_ratio) if log_ratio > 0 else 1.0
        if self._u() >= acc:
            return rec

        # commit
        for a, _b in broken:
            if self.partner.get(a) is not None:
                self._unpair(a)
        if add:
            for e, d in dm.items():
                for _ in range(d):
                    self.m[e] += 1
                    p = self.m[e]
                    self._register_end(self._end(e, p, 0))
                    self._register_end(self._end(e, p, 1))
        for a, b in new_pairs:
            self._pair(a, b)
        if not add:
            # unregister removed ends after unpairing (their pairs were broken)
            seen = set()
            for w in sites:
                for e, p in site_links[w]:
                    l = e * self.stride + (p - 1)
                    if l not in seen:
                        seen.add(l)
                        for side in (0, 1):
                            end = l * 2 + side
                            if end in self.pos:
                                self._unregister_end(end)
            for e, d in dm.items():
                self.m[e] += d
        for w in sites:
            self.n[w] += 1 if add else -1
        self.lam += dlam
        rec.accepted = True
        return rec

    # -- driving -------------------------------------------------------------------

    def step(self) -> MoveRecord:
        self.moves += 1
        if self.catalog and self._u() < self.settings.link_move_mix:
            rec = self.link_step()
        else:
            rec = self.rewire_step()
        k = self.settings.debug_check_every
        if k and self.moves % k == 0:
            self.check_lambda()
        return rec

    def sweep_size(self) -> int:
        return len(self.interior) + max(1, len(self.catalog))

    def sweep(self) -> None:
        for _ in range(self.sweep_size()):
            self.step()


def _one_shot_chain(g, w, params, rng, m_cap=None) -> WireChain:
    cap = m_cap or max(16, max(w.m, default=2) + 2)
    settings = ChainSettings(
        seed=int(rng.integers(0, 2**62)), sweeps=1, m_cap=cap,
        rewire_const_C=min(0.5, 1 / math.sqrt(params.alpha), math.sqrt(params.alpha)))
    return WireChain(g, params, settings, initial=w)


def rewire_step(g, w: wires.WireConfig, params: gibbs.ModelParams,
                rng: np.random.Generator) -> tuple[wires.WireConfig, MoveRecord]:
    """One attempted pairing rewire on a standalone configuration."""
    chain = _one_shot_chain(g, w, params, rng)
    rec = chain.rewire_step()
    return chain.wire_config(), rec


def link_step(g, w: wires.WireConfig, params: gibbs.ModelParams,
              rng: np.random.Generator, m_cap: int = 16) -> tuple[wires.WireConfig, MoveRecord]:
    """One attempted link move (edge-pair or cycle) on a standalone configuration."""
    chain = _one_shot_chain(g, w, params, rng, m_cap=m_cap)
    rec = chain.link_step()
    return chain.wire_config(), rec


def run_chain(g, params: gibbs.ModelParams, settings: ChainSettings,
              observables: dict | None = None,
              initial: wires.WireConfig | None = None):
    """Generator of thinned sample records after burn-in; deterministic in seed.

    Each record carries sweep index, loop count, total link number, and one
    entry per named observable hook (called with the chain).
    """
    chain = WireChain(g, params, settings, initial=initial)
    observables = observables or {}
    for sweep in range(settings.burn_in):
        chain.sweep()
    for sweep in range(settings.sweeps):
        chain.sweep()
        if (sweep + 1) % settings.thinning:
            continue
        rec = {"sweep": sweep + 1, "lambda": chain.lam, "sum_m": int(sum(chain.m))}
        for name, hook in observables.items():
            rec[name] = hook(chain)
        yield rec


def stationarity_check_fixed_m(g, m, alpha: float, steps: int, seed: int,
                               pairing_space_limit: int = 100_000) -> dict:
    """Rewire-only chain at fixed m vs the exact alpha^lambda law.

    Enumerates the pairing space (guarded), runs the chain for `steps`
    attempted rewires counting the state at every step, and reports the total
    variation distance plus per-state z-scores.
    """
    wires.validate_links(g, m)
    total_states = wires.count_pairings(g, m)
    if total_states > pairing_space_limit:
        raise ValueError(f"pairing space {total_states} exceeds the limit")

    params = gibbs.ModelParams(alpha=alpha, J=1.0, potential=gibbs.Factorial())
    configs = list(wires.enumerate_pairings(g, m))
    weights = np.array([alpha ** wires.trace_loops(g, w).lam for w in configs])
    probs = weights / weights.sum()

    settings = ChainSettings(seed=seed, sweeps=1, m_cap=max(2, max(m)),
                             rewire_const_C=min(0.5, 1 / math.sqrt(alpha), math.sqrt(alpha)),
                             link_move_mix=0.0)

    def pairing_key(c: WireChain):
        return frozenset((a, b) for a, b in c.partner.items() if a < b)

    index = {}
    for i, w in enumerate(configs):
        tmp = WireChain(g, params, settings, initial=w, link_moves=False)
        index[pairing_key(tmp)] = i

    chain = WireChain(g, params, settings, initial=configs[0], link_moves=False)
    counts_by_key: dict = {}
    for _ in range(steps):
        chain.rewire_step()
        key = pairing_key(chain)
        counts_by_key[key] = counts_by_key.get(key, 0) + 1

    counts = np.zeros(len(configs), dtype=np.int64)
    for key, c in counts_by_key.items():
        counts[index[key]] = c
    emp = counts / steps
    tv = 0.5 * float(np.abs(emp - probs).sum())
    z = (counts - steps * probs) / np.sqrt(np.maximum(steps * probs * (1 - probs), 1e-12))
    return {
        "n_states": len(configs),
        "tv_distance": tv,
        "max_abs_z": float(np.abs(z).max()),
        "z_scores": z.tolist(),
        "exact_probs": probs.tolist(),
        "empirical": emp.tolist(),
    }
