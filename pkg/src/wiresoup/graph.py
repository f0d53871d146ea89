"""Finite graphs for the wire model: lattice boxes, boundary extensions, fixtures.

Vertices are dense integer ids.  For lattice boxes the id is the mixed-radix
encoding of the (shifted) coordinates, so hot loops can use flat arrays.
Boundary vertices, when present, get ids after all interior ids; boundary
edges connect exactly one interior vertex to one boundary vertex and their
edge ids continue the interior numbering, so `0..n_edges_total-1` is dense.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Graph:
    """Immutable finite graph with an optional boundary.

    ``edges`` holds interior edges (both endpoints interior), ``boundary_edges``
    holds (interior, boundary) pairs.  Edge ids: interior edges first, then
    boundary edges.  Multiplicity of links lives in LinkConfig, not here.
    """

    n_vertices: int
    edges: tuple[tuple[int, int], ...]
    boundary_vertices: tuple[int, ...] = ()
    boundary_edges: tuple[tuple[int, int], ...] = ()
    coords: dict[int, tuple[int, ...]] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        interior = set(range(self.n_vertices)) - set(self.boundary_vertices)
        seen = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop edge ({u},{v})")
            if not (u in interior and v in interior):
                raise ValueError(f"interior edge ({u},{v}) touches the boundary")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
        for u, v in self.boundary_edges:
            if u not in interior or v not in set(self.boundary_vertices):
                raise ValueError(f"boundary edge ({u},{v}) must be (interior, boundary)")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
        for b in self.boundary_vertices:
            if not 0 <= b < self.n_vertices:
                raise ValueError(f"unknown boundary vertex {b}")
        object.__setattr__(self, "_incident", _build_incidence(self))

    # -- queries ---------------------------------------------------------

    @property
    def interior_vertices(self) -> list[int]:
        bset = set(self.boundary_vertices)
        return [v for v in range(self.n_vertices) if v not in bset]

    @property
    def all_edges(self) -> tuple[tuple[int, int], ...]:
        return self.edges + self.boundary_edges

    @property
    def n_edges_total(self) -> int:
        return len(self.edges) + len(self.boundary_edges)

    def is_boundary_vertex(self, v: int) -> bool:
        return v in set(self.boundary_vertices)

    def incident_edges(self, x: int) -> list[int]:
        """All edge ids (including boundary edges) containing interior vertex x."""
        if not 0 <= x < self.n_vertices:
            raise ValueError(f"unknown vertex {x}")
        if self.is_boundary_vertex(x):
            raise ValueError(f"vertex {x} is a boundary vertex")
        return list(self._incident[x])

    def has_boundary(self) -> bool:
        return len(self.boundary_vertices) > 0

    def vertex_at(self, coord: tuple[int, ...]) -> int:
        """Inverse of the coordinate map, for lattice graphs."""
        for v, c in self.coords.items():
            if c == tuple(coord):
                return v
        raise KeyError(coord)

    # -- serialization ---------------------------------------------------

    def to_json(self) -> str:
        return json.dumps(
            {
                "vertices": list(range(self.n_vertices)),
                "edges": [list(e) for e in self.edges],
                "boundary_vertices": list(self.boundary_vertices),
                "boundary_edges": [list(e) for e in self.boundary_edges],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "Graph":
        d = json.loads(text)
        return cls(
            n_vertices=len(d["vertices"]),
            edges=tuple(tuple(e) for e in d["edges"]),
            boundary_vertices=tuple(d.get("boundary_vertices", [])),
            boundary_edges=tuple(tuple(e) for e in d.get("boundary_edges", [])),
        )


def _build_incidence(g: Graph) -> list[tuple[int, ...]]:
    inc: list[list[int]] = [[] for _ in range(g.n_vertices)]
    for eid, (u, v) in enumerate(g.all_edges):
        inc[u].append(eid)
        inc[v].append(eid)
    return [tuple(sorted(l)) for l in inc]


# -- builders ------------------------------------------------------------


def build_box(dims: tuple[int, ...]) -> Graph:
    """Box Π_i {0..dims_i-1} with nearest-neighbour edges, no boundary."""
    if len(dims) < 1 or any(s < 1 for s in dims):
        raise ValueError("dims must be positive")
    verts = list(itertools.product(*[range(s) for s in dims]))
    vid = {c: i for i, c in enumerate(verts)}
    edges = []
    for c in verts:
        for ax in range(len(dims)):
            nb = list(c)
            nb[ax] += 1
            nb = tuple(nb)
            if nb in vid:
                edges.append((vid[c], vid[nb]))
    return Graph(
        n_vertices=len(verts),
        edges=tuple(sorted((min(e), max(e)) for e in edges)),
        coords={i: c for c, i in vid.items()},
    )


def build_box_with_boundary(dims: tuple[int, ...]) -> Graph:
    """Box plus the exterior sites at Euclidean distance 1, as boundary."""
    inner = build_box(dims)
    verts = [inner.coords[i] for i in range(inner.n_vertices)]
    vid = {c: i for i, c in enumerate(verts)}
    bverts: list[tuple[int, ...]] = []
    bedges: list[tuple[int, int]] = []
    bid: dict[tuple[int, ...], int] = {}
    for c in verts:
        for ax in range(len(dims)):
            for step in (-1, 1):
                nb = list(c)
                nb[ax] += step
                nb = tuple(nb)
                if nb in vid:
                    continue
                if nb not in bid:
                    bid[nb] = len(verts) + len(bverts)
                    bverts.append(nb)
                bedges.append((vid[c], bid[nb]))
    coords = {i: c for c, i in vid.items()}
    coords.update({i: c for c, i in bid.items()})
    return Graph(
        n_vertices=len(verts) + len(bverts),
        edges=inner.edges,
        boundary_vertices=tuple(range(len(verts), len(verts) + len(bverts))),
        boundary_edges=tuple(sorted(bedges)),
        coords=coords,
    )


def _shift(g: Graph, L: int) -> Graph:
    coords = {v: tuple(x - L for x in c) for v, c in g.coords.items()}
    return Graph(g.n_vertices, g.edges, g.boundary_vertices, g.boundary_edges, coords)


def build_hypercubic(L: int, d: int) -> Graph:
    """The box {-L..L}^d with nearest-neighbour edges."""
    if d < 1:
        raise ValueError("dimension d must be >= 1")
    if L < 0:
        raise ValueError("L must be >= 0")
    return _shift(build_box((2 * L + 1,) * d), L)


def build_hypercubic_with_boundary(L: int, d: int) -> Graph:
    """The box {-L..L}^d plus its distance-1 external boundary sites."""
    if d < 1:
        raise ValueError("dimension d must be >= 1")
    if L < 0:
        raise ValueError("L must be >= 0")
    return _shift(build_box_with_boundary((2 * L + 1,) * d), L)


def from_edge_list(n_vertices: int, edges, boundary_vertices=(), boundary_edges=()) -> Graph:
    """Explicit construction for tiny test fixtures."""
    return Graph(
        n_vertices=n_vertices,
        edges=tuple(tuple(e) for e in edges),
        boundary_vertices=tuple(boundary_vertices),
        boundary_edges=tuple(tuple(e) for e in boundary_edges),
    )


# Exact-enumeration fixtures used throughout the verification suite.
def single_edge() -> Graph:
    return from_edge_list(2, [(0, 1)])


def path2() -> Graph:
    return from_edge_list(3, [(0, 1), (1, 2)])


def triangle() -> Graph:
    return from_edge_list(3, [(0, 1), (0, 2), (1, 2)])


def square() -> Graph:
    return from_edge_list(4, [(0, 1), (0, 3), (1, 2), (2, 3)])


FIXTURES = {
    "single_edge": single_edge,
    "path2": path2,
    "triangle": triangle,
    "square": square,
}
