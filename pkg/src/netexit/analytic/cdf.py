"""Distribution function of the first observed passage time.

The CDF is a mixture over ``i`` of ``lam^(i+1) phi_i``, and
``lam^(i+1) phi_i(t)`` is the CDF at ``t`` of Gamma(i+1, lam) + Exponential(mu):
the arrival of the attack that carries the critical node, followed by the
next observation.  Each ``phi_i`` is therefore evaluated through its upper tail,
a sum of two non-negative pieces, and the mixture as ``sum(w) - sum(w * tail)``.
That keeps the curve monotone to the last bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammainc, gammaincc, gammaln, hyp1f1
from scipy.stats import binom

from ..errors import RatesTooClose, ThresholdTooLargeForCdf
from ..model import ModelParams
from .poisson import poisson_pmfs, poisson_sf

DISTINCT_RTOL = 1e-9
MAX_SAFE_M = 50


@dataclass(frozen=True)
class CdfCurve:
    thetas: np.ndarray
    values: np.ndarray


def _close(x, y):
    return abs(x - y) <= DISTINCT_RTOL * max(abs(x), abs(y))


def check_distinct_rates(p: ModelParams):
    """Refuse lam == mu, where the closed form of phi_i has a pole.

    lam/b only appears in an intermediate partial fraction that cancels
    exactly, so mu == lam/b is accepted.
    """
    if _close(p.lam, p.mu):
        raise RatesTooClose(f"lambda={p.lam!r} and mu={p.mu!r} coincide", param="mu")


def _second_piece(i, t, lam, mu):
    """lam^(i+1) e^{-mu t} (1 - e^{-(lam-mu)t} sum_{r<=i} ((lam-mu)t)^r/r!) / (lam-mu)^(i+1).

    Non-negative for every sign of lam - mu.
    """
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    tp = t[pos]
    if lam > mu:
        # gammainc is the regularized lower incomplete gamma, i.e. the bracket above
        log_scale = -mu * tp + (i + 1) * (math.log(lam) - math.log(lam - mu))
        out[pos] = np.exp(log_scale) * gammainc(i + 1, (lam - mu) * tp)
    else:
        # e^{-lam t} (lam t)^(i+1)/(i+1)! 1F1(1; i+2; -(mu-lam) t)
        x = lam * tp
        pmf = np.exp(-x + (i + 1) * np.log(x) - gammaln(i + 2.0))
        out[pos] = pmf * hyp1f1(1.0, i + 2.0, -(mu - lam) * tp)
    return out


def _tail(i, t, p):
    """1 - lam^(i+1) phi_i(t)."""
    t = np.asarray(t, dtype=float)
    return gammaincc(i + 1, p.lam * t) + _second_piece(i, t, p.lam, p.mu)


def phi_i(i: int, theta, p: ModelParams):
    """phi_i(t) = (1 - e^{-lam t} sum_{r<=i} (lam t)^r/r!)/lam^(i+1) - (second piece)/lam^(i+1)."""
    check_distinct_rates(p)
    t = np.asarray(theta, dtype=float)
    first = gammainc(i + 1, p.lam * t)
    value = (first - _second_piece(i, t, p.lam, p.mu)) / p.lam ** (i + 1)
    value = np.where(t == 0.0, 0.0, value)
    return float(value) if value.ndim == 0 else value


def mixture_weights(p: ModelParams) -> np.ndarray:
    """w_i such that F = sum_i w_i lam^(i+1) phi_i.

    ``w_i = (1-K) C(M-1,i) a^i b^(M-1-i) + sum_{j=i}^{M-2} pmf_j C(j,i) a^i b^(j-i)``
    with pmf_j the Poisson(xi V) probabilities; lam c_i phi_i and lam d_i phi_i
    both become binomial weights times lam^(i+1) phi_i.
    """
    M = p.M
    i = np.arange(M)
    one_minus_K = poisson_sf(p.xi * p.V, M - 2)
    w = one_minus_K * binom.pmf(i, M - 1, p.a)
    pmf = poisson_pmfs(p.xi * p.V, M - 2)
    for j, pj in enumerate(pmf):
        w[: j + 1] += pj * binom.pmf(i[: j + 1], j, p.a)
    return w


def crossing_time_cdf(theta, p: ModelParams, *, unsafe: bool = False):
    """P(tau <= theta) at the first observed passage.

    Requires lam != mu (relative tolerance ``DISTINCT_RTOL``).  ``M`` above ``MAX_SAFE_M``
    is refused unless ``unsafe=True``.
    """
    check_distinct_rates(p)
    if p.M > MAX_SAFE_M and not unsafe:
        raise ThresholdTooLargeForCdf(
            f"M={p.M} exceeds the CDF cap of {MAX_SAFE_M}; pass unsafe=True to override",
            param="M",
        )
    t = np.asarray(theta, dtype=float)
    if np.any(t < 0) or not np.all(np.isfinite(t)):
        raise ValueError("theta must be finite and >= 0")
    w = mixture_weights(p)
    total = math.fsum(w)

    # Neumaier-compensated sum of w_i * tail_i over i, vectorized over t
    acc = np.zeros_like(t, dtype=float)
    comp = np.zeros_like(acc)
    for i, wi in enumerate(w):
        if wi == 0.0:
            continue
        term = wi * _tail(i, t, p)
        s = acc + term
        comp += np.where(np.abs(acc) >= np.abs(term), (acc - s) + term, (term - s) + acc)
        acc = s
    value = np.clip(total - (acc + comp), 0.0, 1.0)
    value = np.where(t == 0.0, 0.0, value)
    return float(value) if value.ndim == 0 else value


def crossing_time_cdf_curve(grid, p: ModelParams, *, unsafe: bool = False) -> CdfCurve:
    thetas = np.asarray(grid, dtype=float)
    if thetas.ndim != 1 or np.any(np.diff(thetas) < 0):
        raise ValueError("grid must be a one-dimensional ascending sequence")
    return CdfCurve(thetas=thetas, values=crossing_time_cdf(thetas, p, unsafe=unsafe))
