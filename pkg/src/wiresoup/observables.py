"""Loop-level observables: length partitions, marked-pair set partitions,
correlation estimators, and the boundary-connected pair density.

Marked points are (site, pair label q) with q = 1..n_x; a configuration where
some n_x < q is an "undefined point" outcome (None), distinguishable from all
set partitions.  Estimators sum over all q, so the labelling rule (pairs
sorted by their smallest end) never influences the shipped quantities.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from . import stats, wires


# -- set partitions -----------------------------------------------------------


@dataclass(frozen=True)
class SetPartition:
    """Partition of {1..k} into disjoint nonempty blocks."""

    blocks: tuple[frozenset[int], ...]

    def __post_init__(self):
        ground = [i for b in self.blocks for i in b]
        if len(ground) != len(set(ground)) or any(not b for b in self.blocks):
            raise ValueError("blocks must be disjoint and nonempty")
        if set(ground) != set(range(1, len(ground) + 1)):
            raise ValueError("ground set must be {1..k}")
        object.__setattr__(
            self, "blocks", tuple(sorted(self.blocks, key=lambda b: min(b)))
        )

    @classmethod
    def of(cls, *blocks) -> "SetPartition":
        return cls(tuple(frozenset(b) for b in blocks))

    @property
    def k(self) -> int:
        return sum(len(b) for b in self.blocks)

    def is_even(self) -> bool:
        return all(len(b) % 2 == 0 for b in self.blocks)

    def block_sizes(self) -> list[int]:
        return sorted((len(b) for b in self.blocks), reverse=True)


def enumerate_set_partitions(k: int):
    """All set partitions of {1..k} (restricted-growth-string recursion)."""
    def rec(i, blocks):
        if i > k:
            yield SetPartition(tuple(frozenset(b) for b in blocks))
            return
        for b in blocks:
            b.append(i)
            yield from rec(i + 1, blocks)
            b.pop()
        blocks.append([i])
        yield from rec(i + 1, blocks)
        blocks.pop()

    if k == 0:
        yield SetPartition(())
        return
    yield from rec(1, [])


def enumerate_even_partitions(k: int):
    if k % 2:
        return
    for X in enumerate_set_partitions(k):
        if X.is_even():
            yield X


# -- loop length partition -----------------------------------------------------


@dataclass(frozen=True)
class LoopPartitionSample:
    lengths: tuple[int, ...]  # decreasing
    V: int

    @property
    def normalized(self) -> tuple[float, ...]:
        if self.V == 0:
            return ()
        return tuple(l / self.V for l in self.lengths)


def loop_partition(dec: wires.LoopDecomposition) -> LoopPartitionSample:
    lengths = tuple(dec.lengths())
    return LoopPartitionSample(lengths=lengths, V=sum(lengths))


# -- marked-point partitions and correlation estimators --------------------------


def _occupancies_at(g, w: wires.WireConfig, sites):
    return {x: wires.local_occupancy(g, w.m, x) for x in sites}


def induced_partition(g, w: wires.WireConfig, points) -> SetPartition | None:
    """Set partition of the marked (site, q) points given by shared trajectories.

    Returns None (undefined point) when some n_{x_j} < q_j; the trajectory may
    be a closed loop or an open one.
    """
    points = list(points)
    sites = [x for x, _q in points]
    if len(set(sites)) != len(sites):
        raise ValueError("marked sites must be distinct")
    occ = _occupancies_at(g, w, sites)
    if any(occ[x] < q or q < 1 for x, q in points):
        return None
    traj = wires.trace_loops(g, w).pair_traj_map()
    keys = [traj[(x, q)] for x, q in points]
    blocks: dict = {}
    for j, key in enumerate(keys, start=1):
        blocks.setdefault(key, []).append(j)
    return SetPartition(tuple(frozenset(b) for b in blocks.values()))


def _partition_from_keys(keys) -> SetPartition:
    blocks: dict = {}
    for j, key in enumerate(keys, start=1):
        blocks.setdefault(key, []).append(j)
    return SetPartition(tuple(frozenset(b) for b in blocks.values()))


def even_corr_estimator(g, w: wires.WireConfig, sites, half_shift: float = 1.0) -> float:
    """sum_q 1{induced partition even} prod_j 1/(n_{x_j} + half_shift).

    The sum over even set partitions X of the per-partition estimators
    collapses to the indicator that the induced partition is even.
    """
    dec = wires.trace_loops(g, w)
    return even_corr_from_traj(dec.pair_traj_map(), _occupancies_at(g, w, sites),
                               sites, half_shift)


def even_corr_from_traj(traj, occ, sites, half_shift: float = 1.0) -> float:
    sites = list(sites)
    if any(occ[x] == 0 for x in sites):
        return 0.0
    weight = 1.0
    for x in sites:
        weight /= occ[x] + half_shift
    total = 0.0
    for qs in itertools.product(*[range(1, occ[x] + 1) for x in sites]):
        keys = [traj[(x, q)] for x, q in zip(sites, qs)]
        if _partition_from_keys(keys).is_even():
            total += weight
    return total


def per_partition_estimator(g, w: wires.WireConfig, sites, X: SetPartition,
                            half_shift: float = 1.0) -> tuple[float, int]:
    """(weighted sum, unweighted count) over q with induced partition exactly X."""
    sites = list(sites)
    if X.k != len(sites):
        raise ValueError("partition ground set must match the number of sites")
    dec = wires.trace_loops(g, w)
    traj = dec.pair_traj_map()
    occ = _occupancies_at(g, w, sites)
    if any(occ[x] == 0 for x in sites):
        return 0.0, 0
    weight = 1.0
    for x in sites:
        weight /= occ[x] + half_shift
    total = 0.0
    count = 0
    for qs in itertools.product(*[range(1, occ[x] + 1) for x in sites]):
        keys = [traj[(x, q)] for x, q in zip(sites, qs)]
        if _partition_from_keys(keys) == X:
            total += weight
            count += 1
    return total, count


# -- chain-sample estimators ------------------------------------------------------


def tilde_m_estimator(ratios) -> tuple[float, float]:
    """Monte Carlo mean +- stderr of n~_0/(n_0 + shift) samples (batch means)."""
    return stats.batch_means(ratios)


def lmax_survival(lmax_samples, n_max: int | None = None) -> dict:
    """Empirical tail n -> P(l_max >= n) with Wilson 95% bands."""
    xs = list(lmax_samples)
    trials = len(xs)
    if n_max is None:
        n_max = max(xs, default=0) + 2
    out = {"n": [], "p": [], "lower": [], "upper": [], "trials": trials}
    for n in range(1, n_max + 1):
        hits = sum(1 for v in xs if v >= n)
        lo, hi = stats.wilson_interval(hits, trials)
        out["n"].append(n)
        out["p"].append(hits / trials if trials else 0.0)
        out["lower"].append(lo)
        out["upper"].append(hi)
    return out


def cutoff_length(L: int, d: int) -> int:
    """Cut above which a loop counts as long: ceil((2L+1)^(d/2)).

    Grows without bound in L while its ratio to the volume (2L+1)^d vanishes.
    """
    if L < 1:
        raise ValueError("L must be >= 1")
    return math.ceil((2 * L + 1) ** (d / 2))


def splashing_sites(g, k: int) -> list[int]:
    """k interior sites at (greedily) maximal pairwise distance.

    Finite-volume proxy for site tuples whose minimal pairwise separation
    diverges; on lattice graphs distances use the coordinates.
    """
    interior = g.interior_vertices
    if k > len(interior):
        raise ValueError("not enough interior sites")
    if not g.coords:
        return interior[:k]

    def dist(a, b):
        ca, cb = g.coords[a], g.coords[b]
        return sum((x - y) ** 2 for x, y in zip(ca, cb))

    lo = min(interior, key=lambda v: g.coords[v])
    chosen = [lo]
    while len(chosen) < k:
        best = max((v for v in interior if v not in chosen),
                   key=lambda v: (min(dist(v, c) for c in chosen), g.coords[v]))
        chosen.append(best)
    return chosen
