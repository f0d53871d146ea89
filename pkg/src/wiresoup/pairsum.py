"""Exact pairing sums for tiny instances.

For a fixed link configuration m, exact partition functions and correlation
oracles need

    S(m)    = sum over pairings pi of alpha^(number of trajectories),
    S_xy(m) = sum over pi of alpha^lambda * #{(q1, q2): pair q1 at x and
              pair q2 at y on the same trajectory},
    S~_x(m) = sum over pi of alpha^lambda * #{pairs at x on open trajectories}.

Enumerating pairings literally costs prod_x (2 n_x - 1)!! and dies around
n_x ~ 6.  Instead we process interior vertices one at a time and keep, between
vertices, only the matching structure of the still-dangling strand ends,
aggregated by (vertex, edge) class: strands of the same class are
interchangeable, so a state is just a count matrix of partial paths between
classes.  Pairing the ends at a vertex is a small recursion; closing a
trajectory multiplies alpha; paths left over after the last interior vertex
run boundary-to-boundary and are the open trajectories, alpha each.  Every
pairing is summed with its exact multiplicity.

The marked variants track one or two distinguished pairs individually (never
aggregated): a mark is placed on exactly one pair formed at the marked site,
and branches where the marked trajectory cannot satisfy the constraint (both
marks on one trajectory, or marked trajectory open) are dropped.

Brute-force references over literal pairings live here too; tests pin the DP
against them wherever literal enumeration is feasible.
"""

from __future__ import annotations

from functools import lru_cache

from . import wires

DONE = (-1, -1, 3)  # sentinel: a closed loop consumed both marks (sorts with int tuples)

_AT = -1  # "other end at the current vertex"


def _closure_ok(mode: str, marks: int) -> tuple[bool, bool]:
    """(branch alive, both marks consumed) when a loop closes with `marks`."""
    if marks == 0:
        return True, False
    if mode == "pairpair" and marks == 3:
        return True, True
    return False, False  # half-marked loop, or marked loop in open mode


@lru_cache(maxsize=500_000)
def _site_rec(s, k, mk, pending, mode):
    """Sum over pairings of the strand ends at one vertex.

    s: unmarked paths with both ends here; k: sorted ((far class, count), ...)
    unmarked paths with one end here; mk: marked items, ("MS", marks) or
    ("MO", far, marks); pending: mark bit still to be placed here (0 if none).

    Returns {(produced_unmarked, produced_marked, alpha_power): ways} where
    produced_unmarked is a sorted tuple ((c_lo, c_hi), count) of completed
    unmarked paths and produced_marked a sorted tuple of (c_lo, c_hi, marks)
    completed marked paths and DONE sentinels.
    """
    if s == 0 and not k and not mk:
        return {} if pending else {((), (), 0): 1}

    # pop the first stub's path A
    if mk:
        a_item, mk_rest = mk[0], mk[1:]
        if a_item[0] == "MS":
            a_other, a_marks = _AT, a_item[1]
        else:
            a_other, a_marks = a_item[1], a_item[2]
        s_rest, k_rest = s, dict(k)
    elif s > 0:
        a_other, a_marks = _AT, 0
        mk_rest = ()
        s_rest, k_rest = s - 1, dict(k)
    else:
        kd = dict(k)
        far0 = min(kd)
        kd[far0] -= 1
        if kd[far0] == 0:
            del kd[far0]
        a_other, a_marks = far0, 0
        mk_rest = ()
        s_rest, k_rest = 0, kd

    out: dict = {}

    def emit(sub_state, d_pu, d_pm, d_apow, mult):
        if mult == 0:
            return
        sub = _site_rec(*sub_state)
        for (pu, pm, ap), ways in sub.items():
            if d_pu:
                merged = dict(pu)
                for key in d_pu:
                    merged[key] = merged.get(key, 0) + 1
                pu = tuple(sorted(merged.items()))
            if d_pm:
                pm = tuple(sorted(pm + d_pm))
            key = (pu, pm, ap + d_apow)
            out[key] = out.get(key, 0) + ways * mult

    def joined(b_other, b_marks, marks, sub_s, sub_k, sub_mk, sub_pending, mult):
        """Merge path A with path B into one path; dispatch on remaining ends."""
        ends_at = (a_other == _AT) + (b_other == _AT)
        if ends_at == 2:
            if marks:
                emit((sub_s, sub_k, tuple(sorted(sub_mk + (("MS", marks),))),
                      sub_pending, mode), (), (), 0, mult)
            else:
                emit((sub_s + 1, sub_k, tuple(sorted(sub_mk)), sub_pending, mode),
                     (), (), 0, mult)
        elif ends_at == 1:
            far = a_other if a_other != _AT else b_other
            if marks:
                emit((sub_s, sub_k, tuple(sorted(sub_mk + (("MO", far, marks),))),
                      sub_pending, mode), (), (), 0, mult)
            else:
                kd2 = dict(sub_k)
                kd2[far] = kd2.get(far, 0) + 1
                emit((sub_s, tuple(sorted(kd2.items())), tuple(sorted(sub_mk)),
                      sub_pending, mode), (), (), 0, mult)
        else:
            lo, hi = min(a_other, b_other), max(a_other, b_other)
            if marks:
                emit((sub_s, sub_k, tuple(sorted(sub_mk)), sub_pending, mode),
                     (), ((lo, hi, marks),), 0, mult)
            else:
                emit((sub_s, sub_k, tuple(sorted(sub_mk)), sub_pending, mode),
                     ((lo, hi),), (), 0, mult)

    assigns = (0, pending) if pending else (0,)

    k_rest_t = tuple(sorted(k_rest.items()))

    # option 1: close A onto its own other end (only if that end is here)
    if a_other == _AT:
        for a in assigns:
            marks = a_marks | a
            alive, done = _closure_ok(mode, marks)
            if alive:
                emit((s_rest, k_rest_t, mk_rest, pending ^ a, mode),
                     (), (DONE,) if done else (), 1, 1)

    # option 2: partner with a stub of another marked item
    for j, b_item in enumerate(mk_rest):
        sub_mk = mk_rest[:j] + mk_rest[j + 1 :]
        if b_item[0] == "MS":
            b_other, b_marks, mult = _AT, b_item[1], 2
        else:
            b_other, b_marks, mult = b_item[1], b_item[2], 1
        for a in assigns:
            joined(b_other, b_marks | a, a_marks | b_marks | a,
                   s_rest, k_rest_t, sub_mk, pending ^ a, mult)

    # option 3: partner with an unmarked self path (2 stubs each)
    if s_rest > 0:
        for a in assigns:
            joined(_AT, a, a_marks | a, s_rest - 1, k_rest_t, mk_rest,
                   pending ^ a, 2 * s_rest)

    # option 4: partner with an unmarked out path
    for far, cnt in k_rest.items():
        kd2 = dict(k_rest)
        kd2[far] -= 1
        if kd2[far] == 0:
            del kd2[far]
        for a in assigns:
            joined(far, a, a_marks | a, s_rest, tuple(sorted(kd2.items())),
                   mk_rest, pending ^ a, cnt)

    return out


def pairing_sum(g, m, alpha: float, mode: str = "plain",
                site_x: int | None = None, site_y: int | None = None) -> float:
    """S(m), S_xy(m) (mode="pairpair"), or S~_x(m) (mode="open")."""
    if mode == "pairpair":
        if site_x is None or site_y is None or site_x == site_y:
            raise ValueError("pairpair mode needs two distinct marked sites")
    elif mode == "open":
        if site_x is None:
            raise ValueError("open mode needs a marked site")
        if not g.has_boundary():
            return 0.0
    elif mode != "plain":
        raise ValueError(f"unknown mode {mode!r}")

    # class of a strand end: its vertex, with every boundary vertex collapsed
    # to the terminal pseudo-class OMEGA (those ends are never paired again)
    OMEGA = -2
    bset = set(g.boundary_vertices)

    def cls(vertex: int) -> int:
        return OMEGA if vertex in bset else vertex

    paths: dict[tuple[int, int], int] = {}
    for e, (u, v) in enumerate(g.all_edges):
        if int(m[e]) > 0:
            cu, cv = cls(u), cls(v)
            key = (min(cu, cv), max(cu, cv))
            paths[key] = paths.get(key, 0) + int(m[e])

    states: dict[tuple, float] = {(tuple(sorted(paths.items())), ()): 1.0}

    for v in sorted(g.interior_vertices):
        if mode == "pairpair":
            pending = 1 if v == site_x else 2 if v == site_y else 0
        elif mode == "open":
            pending = 1 if v == site_x else 0
        else:
            pending = 0
        new_states: dict[tuple, float] = {}
        for (pk, mk), coeff in states.items():
            s = 0
            kd: dict[int, int] = {}
            passthrough: dict[tuple[int, int], int] = {}
            for (c1, c2), cnt in pk:
                at1, at2 = c1 == v, c2 == v
                if at1 and at2:
                    s += cnt
                elif at1:
                    kd[c2] = kd.get(c2, 0) + cnt
                elif at2:
                    kd[c1] = kd.get(c1, 0) + cnt
                else:
                    passthrough[(c1, c2)] = passthrough.get((c1, c2), 0) + cnt
            mk_here = []
            mk_pass = []
            for item in mk:
                if item == DONE:
                    mk_pass.append(item)
                    continue
                c1, c2, marks = item
                at1, at2 = c1 == v, c2 == v
                if at1 and at2:
                    mk_here.append(("MS", marks))
                elif at1:
                    mk_here.append(("MO", c2, marks))
                elif at2:
                    mk_here.append(("MO", c1, marks))
                else:
                    mk_pass.append(item)
            res = _site_rec(s, tuple(sorted(kd.items())),
                            tuple(sorted(mk_here)), pending, mode)
            for (pu, pm, apow), ways in res.items():
                npaths = dict(passthrough)
                for key, cnt in pu:
                    npaths[key] = npaths.get(key, 0) + cnt
                nmk = tuple(sorted(mk_pass + list(pm)))
                key = (tuple(sorted(npaths.items())), nmk)
                new_states[key] = new_states.get(key, 0.0) + coeff * ways * alpha**apow
        states = new_states

    total = 0.0
    for (pk, mk), coeff in states.items():
        n_open = sum(cnt for _key, cnt in pk)
        done_count = sum(1 for it in mk if it == DONE)
        open_marked = [it for it in mk if it != DONE]
        factor = alpha**n_open
        if mode == "plain":
            ok = not mk
        elif mode == "pairpair":
            if done_count == 1 and not open_marked:
                ok = True
            elif done_count == 0 and len(open_marked) == 1 and open_marked[0][2] == 3:
                ok = True
                factor *= alpha
            else:
                ok = False
        else:  # open
            ok = done_count == 0 and len(open_marked) == 1 and open_marked[0][2] == 1
            if ok:
                factor *= alpha
        if ok:
            total += coeff * factor
    return total


# -- brute-force references ---------------------------------------------------


def pairing_sum_bruteforce(g, m, alpha: float, mode: str = "plain",
                           site_x: int | None = None, site_y: int | None = None,
                           limit: int = 20_000) -> float:
    """Same sums by literal pairing enumeration and loop tracing."""
    total = 0.0
    for w in wires.enumerate_pairings(g, m, limit=limit):
        dec = wires.trace_loops(g, w)
        lam = dec.lam
        if mode == "plain":
            total += alpha**lam
        elif mode == "pairpair":
            traj = dec.pair_traj_map()
            tx = [traj[(site_x, q)] for q in range(1, _n_at(g, m, site_x) + 1)]
            ty = [traj[(site_y, q)] for q in range(1, _n_at(g, m, site_y) + 1)]
            count = sum(1 for a in tx for b in ty if a == b)
            total += alpha**lam * count
        elif mode == "open":
            traj = dec.pair_traj_map()
            count = sum(
                1
                for q in range(1, _n_at(g, m, site_x) + 1)
                if traj[(site_x, q)][0] == "o"
            )
            total += alpha**lam * count
    return total


def _n_at(g, m, x):
    return wires.local_occupancy(g, m, x)


# -- link-configuration enumeration -------------------------------------------


def link_configs(g, m_cap: int, total_cap: int | None = None):
    """All valid m with m_e <= m_cap (and optional total cap), parity-pruned."""
    edges = g.all_edges
    n_e = len(edges)
    interior = set(g.interior_vertices)
    remaining = [0] * g.n_vertices
    for u, v in edges:
        remaining[u] += 1
        remaining[v] += 1
    parity = [0] * g.n_vertices
    m = [0] * n_e

    def rec(i, total):
        if i == n_e:
            yield tuple(m)
            return
        u, v = edges[i]
        for val in range(0, m_cap + 1):
            if total_cap is not None and total + val > total_cap:
                break
            m[i] = val
            parity[u] ^= val & 1
            parity[v] ^= val & 1
            remaining[u] -= 1
            remaining[v] -= 1
            ok = True
            if remaining[u] == 0 and u in interior and parity[u]:
                ok = False
            if ok and remaining[v] == 0 and v in interior and parity[v]:
                ok = False
            if ok:
                yield from rec(i + 1, total + val)
            remaining[u] += 1
            remaining[v] += 1
            parity[u] ^= val & 1
            parity[v] ^= val & 1
        m[i] = 0

    yield from rec(0, 0)
