"""Small statistics helpers shared by the samplers and reports."""

from __future__ import annotations

import math

import numpy as np


def batch_means(samples, n_batches: int = 32) -> tuple[float, float]:
    """Mean and autocorrelation-robust standard error via batch means."""
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        return math.nan, math.nan
    if x.size < 2 * n_batches:
        return float(x.mean()), float(x.std(ddof=1) / math.sqrt(x.size)) if x.size > 1 else math.nan
    usable = (x.size // n_batches) * n_batches
    batches = x[:usable].reshape(n_batches, -1).mean(axis=1)
    return float(x.mean()), float(batches.std(ddof=1) / math.sqrt(n_batches))


def wilson_interval(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials == 0:
        return 0.0, 1.0
    p = successes / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)
