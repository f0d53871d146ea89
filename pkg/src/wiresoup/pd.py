"""Poisson-Dirichlet machinery.

PD(theta) partitions of [0,1] from Beta(1,theta) stick breaking, the closed
forms for partition correlations of uniformly placed points, the generating
function of the even-partition probabilities, and the mean-field split-merge
chain whose invariant measure is PD(alpha/2).

Closed forms: with block sizes n_1..n_l,

    M_theta(X) = theta^l Gamma(theta) Gamma(n_1)...Gamma(n_l) / Gamma(theta + sum n_i),

and the probability that 2k uniform points make an even partition is

    M_theta^even(2k) = Gamma(2k+1) Gamma(k+theta/2) Gamma(theta)
                       / (Gamma(2k+theta) Gamma(k+1) Gamma(theta/2)),

which reduces to (2k-1)!!/(2^k k!) at theta = 1.  (The Gamma(theta) factor is
required for consistency with M_theta(X) at theta not in {1, 2}; the sum over
even partitions of {1,2} must equal the two-point same-block probability
1/(1+theta).)
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .observables import SetPartition, enumerate_even_partitions


@dataclass(frozen=True)
class IntervalPartition:
    """Partition of [0,1]: decreasing parts, with generation order retained."""

    parts: tuple[float, ...]       # decreasing
    generation: tuple[float, ...]  # stick-breaking order

    def __post_init__(self):
        if any(p <= 0 for p in self.parts):
            raise ValueError("parts must be positive")
        if abs(sum(self.parts) - 1.0) > 1e-12:
            raise ValueError("parts must sum to 1")

    @classmethod
    def from_generation(cls, gen) -> "IntervalPartition":
        gen = tuple(float(v) for v in gen)
        return cls(parts=tuple(sorted(gen, reverse=True)), generation=gen)


@dataclass(frozen=True)
class PDParams:
    theta: float

    def __post_init__(self):
        if self.theta <= 0:
            raise ValueError("theta must be positive")


def stick_breaking_sample(theta: float, rng: np.random.Generator,
                          eps: float = 1e-12, n_parts: int | None = None) -> IntervalPartition:
    """PD(theta) sample; sticks are drawn until remainder < eps (or n_parts),
    and the remainder mass is folded into the final part."""
    if theta <= 0:
        raise ValueError("theta must be positive")
    parts = []
    rem = 1.0
    while rem >= eps and (n_parts is None or len(parts) < n_parts):
        y = rng.beta(1.0, theta)
        parts.append(rem * y)
        rem -= rem * y
    if not parts:
        parts = [1.0]
        rem = 0.0
    parts[-1] += rem
    return IntervalPartition.from_generation(parts)


def m_theta(X: SetPartition, theta: float) -> float:
    """Probability that uniform points in a PD(theta) partition realise X."""
    sizes = [len(b) for b in X.blocks]
    if not sizes:
        return 1.0
    log_val = len(sizes) * math.log(theta) + gammaln(theta)
    log_val += sum(gammaln(n) for n in sizes)
    log_val -= gammaln(theta + sum(sizes))
    return math.exp(log_val)


def m_theta_even(k: int, theta: float) -> float:
    """Probability that 2k uniform points make an even partition under PD(theta)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    log_val = (gammaln(2 * k + 1) + gammaln(k + theta / 2.0) + gammaln(theta)
               - gammaln(2 * k + theta) - gammaln(k + 1.0) - gammaln(theta / 2.0))
    return math.exp(log_val)


def m_theta_even_bruteforce(k: int, theta: float) -> float:
    return sum(m_theta(X, theta) for X in enumerate_even_partitions(2 * k))


def sample_induced_partition(theta: float, k: int, rng: np.random.Generator) -> SetPartition:
    """Draw PD(theta) and k uniform points; group indices by shared part.

    Sticks are extended on demand, so points never land in truncated mass.
    """
    us = sorted(((float(u), j + 1) for j, u in enumerate(rng.uniform(0, 1, k))))
    edges = [0.0]  # cumulative stick boundaries, generation order
    rem = 1.0
    blocks: dict[int, list[int]] = {}
    for u, j in us:
        while edges[-1] <= u:
            y = rng.beta(1.0, theta)
            edges.append(edges[-1] + rem * y)
            rem -= rem * y
        idx = bisect.bisect_right(edges, u) - 1
        blocks.setdefault(idx, []).append(j)
    return SetPartition(tuple(frozenset(b) for b in blocks.values()))


def phi_series(h: float, theta: float, rel_tol: float = 1e-15,
               max_terms: int = 400) -> tuple[float, float]:
    """E[prod cosh(h Z_i)] under PD(theta): partial sum and remainder estimate.

    Series (Gamma(theta)/Gamma(theta/2)) sum_n Gamma(n+theta/2) h^(2n)
    / (n! Gamma(2n+theta)); terms eventually decay faster than any geometric
    rate, so the remainder is estimated by the first omitted term.
    """
    total = 0.0
    last = math.inf
    for n in range(max_terms):
        log_t = (gammaln(theta) - gammaln(theta / 2.0) + gammaln(n + theta / 2.0)
                 - gammaln(n + 1.0) - gammaln(2 * n + theta))
        term = math.exp(log_t) * h ** (2 * n)
        total += term
        last = term
        if n > 2 and term < rel_tol * max(total, 1e-300):
            return total, term
    raise ValueError("phi series did not converge")


def phi_mc(h: float, theta: float, n_samples: int, rng: np.random.Generator) -> tuple[float, float]:
    """Monte Carlo estimate of E[prod cosh(h Z_i)] with its standard error."""
    vals = np.empty(n_samples)
    for i in range(n_samples):
        parts = np.asarray(stick_breaking_sample(theta, rng).generation)
        vals[i] = np.prod(np.cosh(h * parts))
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(n_samples))


# -- split-merge ----------------------------------------------------------------


def same_block_statistic(parts) -> float:
    """P(two independent uniform points share a part) = sum of squared parts."""
    a = np.asarray(parts)
    return float((a * a).sum())


def split_merge_step(p: IntervalPartition, alpha: float, c_rate: float,
                     rng: np.random.Generator) -> IntervalPartition:
    """One uniformized event of the mean-field split-merge chain.

    An ordered pair of parts is selected with probability proportional to the
    size product; distinct parts merge with probability prop. to 2c/sqrt(alpha)
    (spread over the two orderings), a doubly-selected part splits uniformly
    with probability prop. to c sqrt(alpha)/2, scaled so probabilities are <= 1.
    """
    parts = list(p.generation)
    _split_merge_events(parts, alpha, c_rate, 1, rng)
    return IntervalPartition.from_generation(parts)


def _split_merge_events(parts: list, alpha: float, c_rate: float,
                        n_events: int, rng: np.random.Generator) -> None:
    """Run uniformized events in place on the generation-order part list."""
    p_merge_ordered = c_rate / math.sqrt(alpha)
    p_split = c_rate * math.sqrt(alpha) / 2.0
    scale = max(p_merge_ordered, p_split)
    p_merge_ordered /= scale
    p_split /= scale
    for _ in range(n_events):
        cum = np.cumsum(parts)
        tot = cum[-1]
        i = int(np.searchsorted(cum, rng.uniform(0.0, tot)))
        j = int(np.searchsorted(cum, rng.uniform(0.0, tot)))
        if i != j:
            if rng.uniform() < p_merge_ordered:
                lo, hi = (i, j) if i < j else (j, i)
                parts[lo] += parts[hi]
                parts.pop(hi)
        else:
            if rng.uniform() < p_split:
                u = rng.uniform()
                whole = parts[i]
                left = whole * u
                if left > 0.0 and whole - left > 0.0:
                    parts[i] = left
                    parts.append(whole - left)


def split_merge_run(p: IntervalPartition, alpha: float, c_rate: float,
                    n_events: int, rng: np.random.Generator) -> IntervalPartition:
    parts = list(p.generation)
    _split_merge_events(parts, alpha, c_rate, n_events, rng)
    return IntervalPartition.from_generation(parts)
