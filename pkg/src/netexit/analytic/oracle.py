"""Brute-force evaluation of the joint functional from the increment transform.

Independent of the closed forms in :mod:`transforms`: it starts from

    Phi = 1 - (1 - gamma) * LC^{-1}_w [ sum_{k<M} [x^k] 1/(1 - gamma(z x, v + w, theta)) ] (V)

where ``[x^k]`` is a truncated power-series coefficient and ``LC^{-1}`` the
inverse Laplace-Carson transform (inverse Laplace of ``F(w)/w``), done with a
Gaver-Stehfest sum in extended precision.  Only meant for small thresholds.
"""

from __future__ import annotations

import mpmath as mp

from ..errors import OracleScaleExceeded
from ..model import ModelParams
from .transforms import TransformQuery, increment_theta_star

STEHFEST_TERMS = 16
WORKING_DPS = 60
MAX_ORACLE_M = 12
MAX_ORACLE_XI_V = 20.0


def _stehfest_weights(n):
    half = n // 2
    weights = []
    for k in range(1, n + 1):
        total = mp.mpf(0)
        for j in range((k + 1) // 2, min(k, half) + 1):
            total += (
                mp.mpf(j) ** half
                * mp.factorial(2 * j)
                / (
                    mp.factorial(half - j)
                    * mp.factorial(j)
                    * mp.factorial(j - 1)
                    * mp.factorial(k - j)
                    * mp.factorial(2 * j - k)
                )
            )
        weights.append((-1) ** (k + half) * total)
    return weights


def stehfest_invert(F, t, n=STEHFEST_TERMS):
    """f(t) from its Laplace transform F, sampled only on the positive real axis."""
    t = mp.mpf(t)
    ln2_t = mp.log(2) / t
    weights = _stehfest_weights(n)
    return ln2_t * mp.fsum(wk * F(k * ln2_t) for k, wk in enumerate(weights, start=1))


def _series_reciprocal(c, n):
    """First n coefficients of 1 / sum(c_k x^k); needs c[0] != 0."""
    out = [mp.mpf(0)] * n
    out[0] = 1 / c[0]
    for k in range(1, n):
        acc = mp.mpf(0)
        for j in range(1, k + 1):
            if j < len(c):
                acc += c[j] * out[k - j]
        out[k] = -acc / c[0]
    return out


def _kernel_partial_sum(z, v, w, theta, m, p, n):
    """sum_{k<n} [x^k] 1 / (1 - gamma(z x, v + w, theta))."""
    # the increment transform is mu / (mu + theta*(z x)), and theta* depends on
    # x only through g(s x) with s = z l(v + w) m; expand g(s x) = a s x / (1 - b s x)
    s = z * (p.xi / (p.xi + v + w)) * m
    g = [mp.mpf(0)] + [p.a * p.b ** (k - 1) * s**k for k in range(1, n)]
    # theta*(x) at x = 0 equals theta + lam; reuse the shared helper for the constant term
    const = increment_theta_star(mp.mpf(0), v + w, theta, m, p)
    denom = [p.mu + const] + [-p.lam * g[k] for k in range(1, n)]
    gamma_series = [p.mu * ck for ck in _series_reciprocal(denom, n)]
    one_minus = [1 - gamma_series[0]] + [-ck for ck in gamma_series[1:]]
    return mp.fsum(_series_reciprocal(one_minus, n))


def operator_inversion_oracle(q: TransformQuery, p: ModelParams) -> float:
    """Numerical value of the joint functional for small ``M`` and ``xi V``."""
    if p.M > MAX_ORACLE_M:
        raise OracleScaleExceeded(f"oracle handles M <= {MAX_ORACLE_M}, got {p.M}", param="M")
    if p.xi * p.V > MAX_ORACLE_XI_V:
        raise OracleScaleExceeded(
            f"oracle handles xi*V <= {MAX_ORACLE_XI_V}, got {p.xi * p.V}", param="V"
        )
    with mp.workdps(WORKING_DPS):
        z, v, theta = mp.mpf(q.z), mp.mpf(q.v), mp.mpf(q.theta)
        m = mp.mpf(q.m(p))

        def carson_image(w):
            return _kernel_partial_sum(z, v, w, theta, m, p, p.M) / w

        inner = stehfest_invert(carson_image, p.V)
        ts = increment_theta_star(z, v, theta, m, p)
        one_minus_gamma = ts / (p.mu + ts)
        return float(1 - one_minus_gamma * inner)
