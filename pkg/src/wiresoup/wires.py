"""Link configurations, pairings, and loop tracing.

A link is one unit of multiplicity on an edge; link p of edge e has two ends,
one at each endpoint vertex.  Ends are encoded as integers,

    end = ((e * stride) + (p - 1)) * 2 + side,

with ``side`` 0/1 for the first/second vertex of the stored edge tuple, so the
opposite end of the same link is ``end ^ 1``.  A pairing matches the ends at
each interior vertex perfectly; ends at boundary vertices stay unmatched, and
trajectories terminating there are open loops.  Copy indices are stable under
moves that do not touch their edge, which keeps labelled-link identities
meaningful across MCMC updates.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

import numpy as np


class InvalidConfigError(ValueError):
    """Link or pairing configuration violating a model constraint."""


def double_factorial(k: int) -> int:
    """k!! with the convention (-1)!! = 1."""
    if k <= 0:
        return 1
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


# -- link configurations ---------------------------------------------------


def local_occupancy(g, m, x: int) -> int:
    """n_x = half the link count over edges at x; rejects odd totals."""
    tot = sum(int(m[e]) for e in g.incident_edges(x))
    if tot % 2:
        raise InvalidConfigError(f"odd number of link ends ({tot}) at vertex {x}")
    return tot // 2


def validate_links(g, m) -> None:
    if len(m) != g.n_edges_total:
        raise InvalidConfigError("link array length != number of edges")
    if any(int(v) < 0 for v in m):
        raise InvalidConfigError("negative link count")
    for x in g.interior_vertices:
        local_occupancy(g, m, x)


def occupancies(g, m) -> dict[int, int]:
    return {x: local_occupancy(g, m, x) for x in g.interior_vertices}


def count_pairings(g, m) -> int:
    """|P_G(m)| = prod_x (2 n_x - 1)!! over interior vertices."""
    out = 1
    for x in g.interior_vertices:
        out *= double_factorial(2 * local_occupancy(g, m, x) - 1)
    return out


# -- end encoding ----------------------------------------------------------


def stride_for(m) -> int:
    return max(1, max((int(v) for v in m), default=1))


def ends_at_vertex(g, m, x: int, stride: int) -> list[int]:
    """Ends at vertex x in ascending id order."""
    out = []
    for e, (u, v) in enumerate(g.all_edges):
        if u == x:
            side = 0
        elif v == x:
            side = 1
        else:
            continue
        for p in range(1, int(m[e]) + 1):
            out.append(((e * stride) + (p - 1)) * 2 + side)
    return sorted(out)


def end_vertex(g, end: int, stride: int) -> int:
    e = (end >> 1) // stride
    u, v = g.all_edges[e]
    return u if (end & 1) == 0 else v


def end_link(end: int, stride: int) -> tuple[int, int]:
    """(edge id, copy index) of an end."""
    link = end >> 1
    e, p0 = divmod(link, stride)
    return e, p0 + 1


# -- pairing and wire configurations ----------------------------------------

Pair = tuple[tuple[int, int], tuple[int, int]]  # ((e,p),(e,p)) at one vertex


@dataclass(frozen=True)
class WireConfig:
    """m plus a pairing: the model's state w = (m, pi).

    ``pairings`` maps each interior vertex to its matching, each pair given as
    a sorted ((edge, copy), (edge, copy)) of the two link ends met there.
    """

    m: tuple[int, ...]
    pairings: tuple[tuple[int, tuple[Pair, ...]], ...]  # (vertex, pairs), vertex ascending

    def pairs_at(self, x: int) -> tuple[Pair, ...]:
        for v, ps in self.pairings:
            if v == x:
                return ps
        raise KeyError(x)

    def to_json(self) -> str:
        return json.dumps(
            {
                "m": list(self.m),
                "pairings": [
                    {"vertex": v, "pairs": [[list(a), list(b)] for a, b in ps]}
                    for v, ps in self.pairings
                ],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "WireConfig":
        d = json.loads(text)
        return cls(
            m=tuple(d["m"]),
            pairings=tuple(
                (
                    entry["vertex"],
                    tuple(tuple(sorted((tuple(a), tuple(b)))) for a, b in entry["pairs"]),
                )
                for entry in d["pairings"]
            ),
        )


def make_wire_config(g, m, pairings_by_vertex: dict[int, list[Pair]]) -> WireConfig:
    m = tuple(int(v) for v in m)
    validate_links(g, m)
    entries = []
    for x in g.interior_vertices:
        pairs = tuple(
            tuple(sorted((tuple(a), tuple(b)))) for a, b in pairings_by_vertex.get(x, [])
        )
        want = local_occupancy(g, m, x)
        if len(pairs) != want:
            raise InvalidConfigError(f"vertex {x}: {len(pairs)} pairs, expected {want}")
        entries.append((x, tuple(sorted(pairs))))
    return WireConfig(m=m, pairings=tuple(entries))


def partner_map(g, w: WireConfig, stride: int) -> dict[int, int]:
    """End -> matched end, from the structured pairing."""
    vert_side = {}
    for e, (u, v) in enumerate(g.all_edges):
        vert_side[(e, u)] = 0
        vert_side[(e, v)] = 1

    def enc(x, ep):
        e, p = ep
        return ((e * stride) + (p - 1)) * 2 + vert_side[(e, x)]

    partner: dict[int, int] = {}
    for x, pairs in w.pairings:
        for a, b in pairs:
            ea, eb = enc(x, a), enc(x, b)
            if ea in partner or eb in partner:
                raise InvalidConfigError(f"end matched twice at vertex {x}")
            partner[ea] = eb
            partner[eb] = ea
    # compatibility: every end at an interior vertex must be matched
    for x in g.interior_vertices:
        for end in ends_at_vertex(g, w.m, x, stride):
            if end not in partner:
                raise InvalidConfigError(f"dangling end at vertex {x}")
    return partner


# -- loop tracing ------------------------------------------------------------


@dataclass(frozen=True)
class LoopDecomposition:
    """Closed loops and open (boundary-to-boundary) loops of a wire config.

    Closed loops are canonical under cyclic shift and inversion; open loops
    under inversion.  ``pair_trajectory`` maps (vertex, pair label q) to a
    trajectory key ("c"|"o", index); labels q = 1..n_x sort the pairs at a
    vertex by their smallest (edge, copy) end.
    """

    loops: tuple[tuple[tuple[int, int], ...], ...]
    open_loops: tuple[tuple[tuple[int, int], ...], ...]
    pair_trajectory: tuple[tuple[tuple[int, int], tuple[str, int]], ...]

    @property
    def lam(self) -> int:
        return len(self.loops) + len(self.open_loops)

    @property
    def total_length(self) -> int:
        return sum(len(l) for l in self.loops) + sum(len(l) for l in self.open_loops)

    def lengths(self) -> list[int]:
        out = [len(l) for l in self.loops] + [len(l) for l in self.open_loops]
        return sorted(out, reverse=True)

    def pair_traj_map(self) -> dict[tuple[int, int], tuple[str, int]]:
        return dict(self.pair_trajectory)


def canonical_closed(seq: list[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    """Smallest representative over rotations and the two directions."""
    best = None
    n = len(seq)
    for s in (seq, seq[::-1]):
        for r in range(n):
            cand = tuple(s[r:] + s[:r])
            if best is None or cand < best:
                best = cand
    return best


def canonical_open(seq: list[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    a, b = tuple(seq), tuple(seq[::-1])
    return min(a, b)


def _walk_from(end: int, partner: dict[int, int], stride: int):
    """Follow links from an end until the loop closes or the boundary is hit.

    Returns (links in order, closed?, final end).
    """
    links = []
    cur = end
    start = end
    while True:
        links.append(cur >> 1)
        opposite = cur ^ 1
        nxt = partner.get(opposite)
        if nxt is None:
            return links, False, opposite
        cur = nxt
        if cur == start:
            return links, True, cur


def trace_loops_from_partner(g, m, partner: dict[int, int], stride: int) -> LoopDecomposition:
    all_links = []
    for e in range(g.n_edges_total):
        for p in range(1, int(m[e]) + 1):
            all_links.append(e * stride + (p - 1))

    bset = set(g.boundary_vertices)
    boundary_ends = []
    for e, (u, v) in enumerate(g.all_edges):
        for p in range(1, int(m[e]) + 1):
            base = ((e * stride) + (p - 1)) * 2
            if u in bset:
                boundary_ends.append(base)
            if v in bset:
                boundary_ends.append(base + 1)

    visited: set[int] = set()
    open_loops = []
    link_traj: dict[int, tuple[str, int]] = {}
    for end in sorted(boundary_ends):
        if (end >> 1) in visited:
            continue
        # walk inward: cross this link first, then follow partners
        links = [end >> 1]
        cur = end ^ 1
        while True:
            nxt = partner.get(cur)
            if nxt is None:
                break
            links.append(nxt >> 1)
            cur = nxt ^ 1
        idx = len(open_loops)
        for l in links:
            if l in visited:
                raise InvalidConfigError("corrupt pairing: link visited twice")
            visited.add(l)
            link_traj[l] = ("o", idx)
        open_loops.append([end_link(l * 2, stride) for l in links])

    loops = []
    for link in sorted(all_links):
        if link in visited:
            continue
        try:
            links, closed, _ = _walk_from(link * 2, partner, stride)
        except KeyError as exc:
            raise InvalidConfigError("dangling end in pairing") from exc
        if not closed:
            raise InvalidConfigError("dangling end in pairing")
        idx = len(loops)
        for l in links:
            if l in visited:
                raise InvalidConfigError("corrupt pairing: link visited twice")
            visited.add(l)
            link_traj[l] = ("c", idx)
        loops.append([end_link(l * 2, stride) for l in links])

    # pair labels: sort pairs at each vertex by smallest end id
    pair_traj = []
    by_vertex: dict[int, list[tuple[int, int]]] = {}
    for a, b in partner.items():
        if a > b:
            continue
        x = end_vertex(g, a, stride)
        by_vertex.setdefault(x, []).append((a, b))
    for x, pairs in by_vertex.items():
        for q, (a, _b) in enumerate(sorted(pairs), start=1):
            pair_traj.append(((x, q), link_traj[a >> 1]))

    return LoopDecomposition(
        loops=tuple(sorted(canonical_closed(l) for l in loops)),
        open_loops=tuple(sorted(canonical_open(l) for l in open_loops)),
        pair_trajectory=tuple(sorted(pair_traj)),
    )


def trace_loops(g, w: WireConfig) -> LoopDecomposition:
    """Deterministic loop decomposition of a wire configuration."""
    validate_links(g, w.m)
    stride = stride_for(w.m)
    partner = partner_map(g, w, stride)
    return trace_loops_from_partner(g, w.m, partner, stride)


def open_loop_occupancy(g, w: WireConfig, x: int) -> int:
    """n~_x: pairs at x lying on boundary-connected trajectories."""
    if not g.has_boundary():
        raise InvalidConfigError("open_loop_occupancy needs a graph with boundary")
    dec = trace_loops(g, w)
    return sum(1 for (v, _q), (kind, _i) in dec.pair_trajectory if v == x and kind == "o")


# -- pairing enumeration and sampling ----------------------------------------


def _matchings(items: list) -> list[list[tuple]]:
    """All perfect matchings of an even-sized list."""
    if not items:
        return [[]]
    first, rest = items[0], items[1:]
    out = []
    for i, other in enumerate(rest):
        sub = rest[:i] + rest[i + 1 :]
        for m in _matchings(sub):
            out.append([(first, other)] + m)
    return out


def enumerate_pairings(g, m, limit: int | None = None):
    """Yield every WireConfig pairing compatible with m (tiny instances only)."""
    validate_links(g, m)
    total = count_pairings(g, m)
    if limit is not None and total > limit:
        raise InvalidConfigError(f"pairing space {total} exceeds limit {limit}")
    stride = stride_for(m)
    per_site = []
    interior = g.interior_vertices
    for x in interior:
        ends = ends_at_vertex(g, m, x, stride)
        site_pairs = []
        for match in _matchings(ends):
            site_pairs.append(
                tuple(
                    tuple(sorted((end_link(a, stride), end_link(b, stride))))
                    for a, b in match
                )
            )
        per_site.append(site_pairs)
    for combo in itertools.product(*per_site):
        yield make_wire_config(
            g, m, {x: list(pairs) for x, pairs in zip(interior, combo)}
        )


def sample_uniform_pairing(g, m, rng: np.random.Generator) -> WireConfig:
    """Uniform element of P_G(m): independent uniform matchings per site."""
    validate_links(g, m)
    stride = stride_for(m)
    pairings: dict[int, list[Pair]] = {}
    for x in g.interior_vertices:
        ends = ends_at_vertex(g, m, x, stride)
        pairs = []
        while ends:
            a = ends.pop(0)
            j = int(rng.integers(0, len(ends)))
            b = ends.pop(j)
            pairs.append(tuple(sorted((end_link(a, stride), end_link(b, stride)))))
        pairings[x] = pairs
    return make_wire_config(g, m, pairings)
