"""Poisson probabilities for large means without factorial overflow.

Every pmf term is formed as ``exp(-x + j log x - lgamma(j + 1))`` and summed
with ``math.fsum``.  Whichever tail is the smaller one is summed directly;
the CDF near 1 is then ``1 - tail`` rather than a long sum that drifts.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln

from ..errors import NegativeMean


def _check_mean(mean):
    mean = float(mean)
    if not math.isfinite(mean):
        raise NegativeMean(f"Poisson mean must be finite, got {mean!r}", param="mean")
    if mean < 0.0:
        raise NegativeMean(f"Poisson mean must be >= 0, got {mean!r}", param="mean")
    return mean


def poisson_pmfs(mean, kmax):
    """Array of P(X = j) for j = 0..kmax (empty when kmax < 0)."""
    mean = _check_mean(mean)
    if kmax < 0:
        return np.zeros(0)
    j = np.arange(kmax + 1, dtype=float)
    if mean == 0.0:
        out = np.zeros(kmax + 1)
        out[0] = 1.0
        return out
    return np.exp(-mean + j * math.log(mean) - gammaln(j + 1.0))


def _tail_bounds(mean):
    # j beyond this carries < 1e-300 of mass
    spread = 40.0 * math.sqrt(mean) + 50.0
    return int(math.ceil(mean + spread))


def _upper_sum(mean, k):
    """P(X > k) summed term by term."""
    hi = max(_tail_bounds(mean), k + 60)
    j = np.arange(k + 1, hi + 1, dtype=float)
    terms = np.exp(-mean + j * math.log(mean) - gammaln(j + 1.0))
    return math.fsum(terms)


def poisson_cdf(mean, k):
    """P(X <= k) for X ~ Poisson(mean); 0 for k < 0."""
    mean = _check_mean(mean)
    k = int(k)
    if k < 0:
        return 0.0
    if mean == 0.0:
        return 1.0
    if k >= mean:
        return max(0.0, 1.0 - _upper_sum(mean, k))
    return min(1.0, math.fsum(poisson_pmfs(mean, k)))


def poisson_sf(mean, k):
    """P(X > k), accurate when small."""
    mean = _check_mean(mean)
    k = int(k)
    if k < 0:
        return 1.0
    if mean == 0.0:
        return 0.0
    if k >= mean:
        return min(1.0, _upper_sum(mean, k))
    return max(0.0, 1.0 - math.fsum(poisson_pmfs(mean, k)))
