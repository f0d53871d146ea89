"""Gibbs weight of wire configurations, exact partition sums, rigorous bounds.

The probability of w = (m, pi) is proportional to

    alpha^lambda(w) * prod_e J_e^{m_e} / m_e! * exp(-sum_x U(n_x)),

with the product over all edges (boundary ones included) and the potential
over interior sites only.  Everything is evaluated in log space; forbidden
configurations (U = +inf, or J_e = 0 with m_e > 0) get -inf.

Exact partition sums enumerate link configurations up to per-edge and total
caps and use the strand DP of `pairsum` for the pairing sum at fixed m; a
truncation certificate is reported alongside, driven by the standard
(2n-1)!! e^{-U(n)} <= C^n coupling bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, logsumexp

from . import pairsum, wires


# -- potentials --------------------------------------------------------------


class GammaN:
    """e^{-U(n)} = Gamma(N/2) / Gamma(n + N/2); ties the wire model to O(N) spins."""

    def __init__(self, N: float):
        if N <= 0:
            raise ValueError("N must be positive")
        self.N = float(N)

    def U(self, n: int) -> float:
        return gammaln(n + self.N / 2.0) - gammaln(self.N / 2.0)

    def coupling_certificate(self, n_max: int = 64) -> float:
        # f(n) = (2n-1)!! e^{-U(n)} has ratio (2n-1)/(n-1+N/2) with supremum
        # max(2, f(1)); the scan catches small-N cases where f(n)^{1/n} starts high.
        return _scan_certificate(self, n_max)

    def __repr__(self):
        return f"GammaN({self.N})"


class Factorial:
    """e^{-U(n)} = 1/n!; identical to GammaN(2)."""

    def U(self, n: int) -> float:
        return gammaln(n + 1.0)

    def coupling_certificate(self, n_max: int = 64) -> float:
        return _scan_certificate(self, n_max)

    def __repr__(self):
        return "Factorial()"


class TableU:
    """Explicit finite table of U values with a +inf tail; U(0) must be 0."""

    def __init__(self, values):
        values = [float(v) for v in values]
        if not values or values[0] != 0.0:
            raise ValueError("TableU requires U(0) = 0")
        self.values = values

    def U(self, n: int) -> float:
        return self.values[n] if n < len(self.values) else math.inf

    def coupling_certificate(self, n_max: int = 64) -> float:
        return _scan_certificate(self, max(n_max, len(self.values) + 1))

    def __repr__(self):
        return f"TableU({self.values})"


def _log_dfact(k: int) -> float:
    """log k!! for odd k >= -1."""
    if k <= 0:
        return 0.0
    n = (k + 1) // 2  # k = 2n - 1
    return gammaln(2 * n + 1) - n * math.log(2.0) - gammaln(n + 1)


def _scan_certificate(potential, n_max: int) -> float:
    """Smallest simple C with (2n-1)!! e^{-U(n)} <= C^n, scan plus tail check.

    The scan takes max f(n)^{1/n} (at least 2); validity beyond the scan
    window needs the step ratio f(n)/f(n-1) to stay <= C, which we check over
    the window and which holds for the built-in families because the ratio is
    monotone with limit 2 (or the potential has a +inf tail).
    """
    logC = math.log(2.0)
    logf_prev = 0.0
    for n in range(1, n_max + 1):
        U = potential.U(n)
        if math.isinf(U):
            break
        logf = _log_dfact(2 * n - 1) - U
        logC = max(logC, logf / n)
        logf_prev = logf
    C = math.exp(logC)
    # window ratio check
    prev = 1.0
    for n in range(1, n_max + 1):
        U = potential.U(n)
        if math.isinf(U):
            break
        f = math.exp(_log_dfact(2 * n - 1) - U)
        if prev > 0 and f / prev > C * (1 + 1e-12):
            raise ValueError("coupling certificate failed: ratio exceeds C in scan window")
        prev = f
    return C


# -- model parameters --------------------------------------------------------


@dataclass(frozen=True)
class ModelParams:
    """Loop parameter alpha, couplings J (scalar = constant), potential U."""

    alpha: float
    J: float | tuple[float, ...]
    potential: object = field(default_factory=Factorial)

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        js = [self.J] if np.isscalar(self.J) else list(self.J)
        if any(j < 0 for j in js):
            raise ValueError("couplings must be nonnegative")
        if self.potential.U(0) != 0.0:
            raise ValueError("potential must be normalised with U(0) = 0")

    def edge_J(self, g) -> np.ndarray:
        if np.isscalar(self.J):
            return np.full(g.n_edges_total, float(self.J))
        arr = np.asarray(self.J, dtype=float)
        if arr.shape != (g.n_edges_total,):
            raise ValueError("J array length != number of edges")
        return arr

    @property
    def alpha_bar(self) -> float:
        return max(math.sqrt(self.alpha), 1.0)


@dataclass(frozen=True)
class BoundParams:
    """Certificate C with (2n-1)!! e^{-U(n)} <= C^n, plus alpha_bar and eta."""

    C: float
    alpha_bar: float
    eta: float = 0.0

    def __post_init__(self):
        if self.C <= 0 or self.alpha_bar < 1 or self.eta < 0:
            raise ValueError("invalid bound parameters")

    @classmethod
    def for_params(cls, params: ModelParams, eta: float = 0.0, n_max: int = 64):
        return cls(
            C=params.potential.coupling_certificate(n_max),
            alpha_bar=params.alpha_bar,
            eta=eta,
        )


def check_certificate(potential, C: float, n_max: int = 64) -> bool:
    for n in range(1, n_max + 1):
        U = potential.U(n)
        if math.isinf(U):
            return True
        if _log_dfact(2 * n - 1) - U > n * math.log(C) + 1e-9:
            return False
    return True


# -- weights -----------------------------------------------------------------


def log_link_weight(g, m, params: ModelParams) -> float:
    """log of prod_e J^m/m! * exp(-sum_x U(n_x)); -inf for forbidden configs."""
    J = params.edge_J(g)
    out = 0.0
    for e in range(g.n_edges_total):
        me = int(m[e])
        if me == 0:
            continue
        if J[e] == 0.0:
            return -math.inf
        out += me * math.log(J[e]) - gammaln(me + 1.0)
    for x in g.interior_vertices:
        U = params.potential.U(wires.local_occupancy(g, m, x))
        if math.isinf(U):
            return -math.inf
        out -= U
    return out


def log_weight(g, w: wires.WireConfig, params: ModelParams) -> float:
    """Unnormalised log probability of a wire configuration."""
    lam = wires.trace_loops(g, w).lam
    lw = log_link_weight(g, w.m, params)
    if math.isinf(lw):
        return lw
    return lam * math.log(params.alpha) + lw


# -- exact partition sums ------------------------------------------------------


def _tail_bound(g, params: ModelParams, m_cap: int, total_cap: int | None) -> float:
    """Upper bound on the weight omitted by the caps (Poisson tail estimates)."""
    C = params.potential.coupling_certificate()
    ab = params.alpha_bar
    J = params.edge_J(g)
    lam = ab * C * J  # per-edge Poisson-like rate
    mu = float(lam.sum())

    def poisson_tail(rate, k):
        # sum_{m > k} rate^m / m!
        term = rate ** (k + 1) / math.gamma(k + 2)
        total = 0.0
        m = k + 1
        while term > total * 1e-18 + 1e-320:
            total += term
            m += 1
            term *= rate / m
            if m > k + 400:
                break
        return total

    tail = sum(
        poisson_tail(lam[e], m_cap) * math.exp(mu - lam[e]) for e in range(len(J))
    )
    if total_cap is not None:
        tail += poisson_tail(mu, total_cap)
    return tail


def partition_exact(g, params: ModelParams, m_cap: int = 16,
                    total_cap: int | None = None, guard_edges: int = 6):
    """Z_G(alpha, J) truncated at the caps, with a truncation upper bound.

    Returns (Z, tail_bound).  tiny-instance guard: at most `guard_edges` edges.
    """
    if g.n_edges_total > guard_edges:
        raise ValueError(
            f"partition_exact guard: {g.n_edges_total} edges > {guard_edges}"
        )
    log_terms = []
    for m in pairsum.link_configs(g, m_cap, total_cap):
        lw = log_link_weight(g, m, params)
        if math.isinf(lw):
            continue
        S = pairsum.pairing_sum(g, m, params.alpha)
        log_terms.append(lw + math.log(S))
    Z = float(np.exp(logsumexp(log_terms))) if log_terms else 0.0
    return Z, _tail_bound(g, params, m_cap, total_cap)


def partition_upper_bound(g, params: ModelParams, bound: BoundParams) -> float:
    """Coupling bound exp(alpha_bar * C * sum_e J_e); certificate re-checked."""
    if not check_certificate(params.potential, bound.C):
        raise ValueError("invalid coupling certificate C")
    return math.exp(bound.alpha_bar * bound.C * float(params.edge_J(g).sum()))


def exact_m_marginal(g, params: ModelParams, m_cap: int = 16,
                     total_cap: int | None = None) -> dict[tuple[int, ...], float]:
    """Exact marginal law of the link configuration under the truncated sum."""
    terms = {}
    for m in pairsum.link_configs(g, m_cap, total_cap):
        lw = log_link_weight(g, m, params)
        if math.isinf(lw):
            continue
        S = pairsum.pairing_sum(g, m, params.alpha)
        terms[tuple(int(v) for v in m)] = lw + math.log(S)
    norm = logsumexp(list(terms.values()))
    return {m: float(np.exp(l - norm)) for m, l in terms.items()}


def pair_correlation_sum(g, params: ModelParams, x: int, y: int, half_shift: float,
                         m_cap: int = 12, total_cap: int | None = None) -> float:
    """E[ sum_{q1,q2} 1{same trajectory} / ((n_x + s)(n_y + s)) ] with s = half_shift.

    Exact under the truncation caps; this is the wire side of the even
    pair-correlation identity.
    """
    log_num = []
    sign = []
    log_den = []
    for m in pairsum.link_configs(g, m_cap, total_cap):
        lw = log_link_weight(g, m, params)
        if math.isinf(lw):
            continue
        S = pairsum.pairing_sum(g, m, params.alpha)
        log_den.append(lw + math.log(S))
        Sxy = pairsum.pairing_sum(g, m, params.alpha, mode="pairpair",
                                  site_x=x, site_y=y)
        if Sxy > 0:
            nx = wires.local_occupancy(g, m, x)
            ny = wires.local_occupancy(g, m, y)
            log_num.append(lw + math.log(Sxy)
                           - math.log(nx + half_shift) - math.log(ny + half_shift))
    if not log_num:
        return 0.0
    return float(np.exp(logsumexp(log_num) - logsumexp(log_den)))


def open_occupancy_sum(g, params: ModelParams, x: int, half_shift: float,
                       m_cap: int = 12, total_cap: int | None = None) -> float:
    """E[ n~_x / (n_x + s) ] by exact enumeration on a boundary graph."""
    if not g.has_boundary():
        raise ValueError("open_occupancy_sum needs a boundary graph")
    log_num = []
    log_den = []
    for m in pairsum.link_configs(g, m_cap, total_cap):
        lw = log_link_weight(g, m, params)
        if math.isinf(lw):
            continue
        S = pairsum.pairing_sum(g, m, params.alpha)
        log_den.append(lw + math.log(S))
        St = pairsum.pairing_sum(g, m, params.alpha, mode="open", site_x=x)
        if St > 0:
            nx = wires.local_occupancy(g, m, x)
            log_num.append(lw + math.log(St) - math.log(nx + half_shift))
    if not log_num:
        return 0.0
    return float(np.exp(logsumexp(log_num) - logsumexp(log_den)))


# -- closed-form bounds ---------------------------------------------------------


def small_J_threshold(d: int) -> float:
    """J below which the longest-loop bound converges at eta = 0 (alpha=2, C=2)."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return 2.0 ** (-1.5) * math.log1p(1.0 / (2 * d) ** 2)


def lmax_tail_bound(d: int, J_const: float, n: int, bound: BoundParams) -> float:
    """Walk-sum bound on P(longest loop through a site has length >= n).

    Returns e^{-eta n} / (1 - rho) with rho = 2d sqrt(e^{e^eta alpha_bar C J} - 1),
    or +inf when rho >= 1 (divergent is a value, not an error).
    """
    rho = 2 * d * math.sqrt(math.expm1(math.exp(bound.eta) * bound.alpha_bar * bound.C * J_const))
    if rho >= 1.0:
        return math.inf
    return math.exp(-bound.eta * n) / (1.0 - rho)
