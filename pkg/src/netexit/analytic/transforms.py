"""Closed-form transforms and means at the first observed passage.

All functions evaluate on the real domain: ``0 <= z <= 1``, ``v >= 0``,
``theta >= 0`` and ``0 < m_beta <= 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ParameterOutOfRange
from ..model import ModelParams
from .poisson import poisson_cdf, poisson_pmfs, poisson_sf

# phi switches to its terminating-sum form when v + xi (1 - d) falls below
# this fraction of xi + v; the closed form loses ~log10(1/ratio) digits there.
SINGULAR_BAND = 1e-6


@dataclass(frozen=True)
class TransformQuery:
    """Evaluation point; ``m_beta=None`` takes the value stored in the params."""

    z: float = 1.0
    v: float = 0.0
    theta: float = 0.0
    m_beta: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.z <= 1.0:
            raise ParameterOutOfRange(f"z must lie in [0, 1], got {self.z!r}", param="z")
        if not self.v >= 0.0 or not math.isfinite(self.v):
            raise ParameterOutOfRange(f"v must be finite and >= 0, got {self.v!r}", param="v")
        if not self.theta >= 0.0 or not math.isfinite(self.theta):
            raise ParameterOutOfRange(
                f"theta must be finite and >= 0, got {self.theta!r}", param="theta"
            )
        if self.m_beta is not None and not 0.0 < self.m_beta <= 1.0:
            raise ParameterOutOfRange(
                f"m_beta must lie in (0, 1], got {self.m_beta!r}", param="m_beta"
            )

    def m(self, p: ModelParams) -> float:
        return p.m_beta if self.m_beta is None else self.m_beta


def increment_theta_star(z, v, theta, m, p):
    """theta + lam - lam g(z l(v) m), written as theta + lam (1 - s)/(1 - b s).

    Plain arithmetic only, so mpmath numbers pass through unchanged.
    """
    s = z * (p.xi / (p.xi + v)) * m
    return theta + p.lam * (1 - s) / (1 - p.b * s)


def gamma_transform(q: TransformQuery, p: ModelParams) -> float:
    """Joint transform of one observation epoch's increment (nodes, weight, gap, passive)."""
    ts = increment_theta_star(q.z, q.v, q.theta, q.m(p), p)
    return p.mu / (p.mu + ts)


def _one_minus_d(z, theta, m, p):
    # 1 - z m (lam + b theta)/(lam + theta) without cancellation
    zm = z * m
    return ((p.lam + theta) * (1.0 - zm) + zm * p.a * theta) / (p.lam + theta)


def _phi_terminating(r, B, p):
    """sum_{k<M} r^k P(Gamma(k, B) <= V): phi as a finite sum, valid everywhere."""
    M = p.M
    pmf = poisson_pmfs(B * p.V, M - 2)
    # P(Gamma(k, B) <= V) = P(Poisson(B V) >= k) = 1 - cdf(k - 1)
    below = np.concatenate(([0.0], np.cumsum(pmf)))[:M]
    k = np.arange(M)
    return math.fsum((r**k) * (1.0 - below))


def phi(q: TransformQuery, p: ModelParams) -> float:
    r"""The inverted kernel entering the joint functional.

    With ``d = z m (lam + b theta)/(lam + theta)``, ``A = v + xi (1 - d)`` and
    ``B = xi + v``::

        phi = B/A - (d xi)^M (1 - P[Pois(BV) <= M-2]) / (A B^(M-1))
                  - d xi e^{-BV} sum_{j<=M-2} (d xi V)^j / j! / A

    ``A = 0`` only when ``v = 0`` and ``d = 1``; there the limit
    ``M - (M-1) K + xi V P[Pois(xi V) <= M-3]`` is returned.
    """
    m = q.m(p)
    xi, V, M = p.xi, p.V, p.M
    one_minus_d = _one_minus_d(q.z, q.theta, m, p)
    d = 1.0 - one_minus_d
    B = xi + q.v
    A = q.v + xi * one_minus_d

    if A == 0.0:
        x = xi * V
        return M - (M - 1) * poisson_cdf(x, M - 2) + x * poisson_cdf(x, M - 3)
    if A <= SINGULAR_BAND * B:
        return _phi_terminating(d * xi / B, B, p)

    dxi = d * xi
    ratio_pow = (dxi / B) ** (M - 1)
    t1 = B / A
    t2 = dxi * ratio_pow * poisson_sf(B * V, M - 2) / A
    t3 = dxi * math.exp(-A * V) * poisson_cdf(dxi * V, M - 2) / A
    return t1 - t2 - t3


def joint_functional(q: TransformQuery, p: ModelParams) -> float:
    """E[z^N e^{-vW} e^{-theta tau} e^{beta.P}] at the first observed passage."""
    lam, mu, a, b = p.lam, p.mu, p.a, p.b
    theta = q.theta
    ts = increment_theta_star(q.z, q.v, theta, q.m(p), p)
    one_minus_gamma = ts / (mu + ts)
    if one_minus_gamma == 0.0:
        return 1.0
    bracket = (
        1.0
        + b * mu / (lam + b * theta)
        + a * lam * mu / ((lam + b * theta) * (lam + theta)) * phi(q, p)
    )
    return 1.0 - one_minus_gamma * bracket


def pgf_nodes(z, p: ModelParams):
    """E[z^N] at the first observed passage (passive component off).

    ``a mu (1 - phi*) / (lam + mu - (lam + b mu) z)`` where
    ``1 - phi* = z^M (1 - K) + e^{-xi V} sum_{j<=M-2} (xi V)^j / j! z^(j+1)``.
    """
    z_arr = np.asarray(z, dtype=float)
    x = p.xi * p.V
    M = p.M
    pmf = poisson_pmfs(x, M - 2)
    one_minus_K = poisson_sf(x, M - 2)
    # Horner over sum_j pmf_j z^(j+1)
    poly = np.zeros_like(z_arr)
    for coef in pmf[::-1]:
        poly = (poly + coef) * z_arr
    numer = z_arr**M * one_minus_K + poly
    value = p.a * p.mu * numer / (p.lam + p.mu - (p.lam + p.b * p.mu) * z_arr)
    return float(value) if value.ndim == 0 else value


def weight_scale(p: ModelParams) -> float:
    """(lam + mu) / (a mu xi), the mean of W when M = 1."""
    return (p.lam + p.mu) / (p.a * p.mu * p.xi)


def lst_weight(v, p: ModelParams):
    """E[e^{-v W}] at the first observed passage.

    The last two terms of the published form, ``xi^(M-1)/((1+kv)(v+xi)^(M-1))``
    minus the finite sum, collapse to ``(xi/(xi+v))^(M-1) P[Pois((xi+v)V) >= M-1]
    / (1 + k v)``; that is what gets evaluated.
    """
    v_arr = np.asarray(v, dtype=float)
    xi, V, M = p.xi, p.V, p.M
    K = poisson_cdf(xi * V, M - 2)
    k = weight_scale(p)
    flat = v_arr.ravel()
    tail = np.array([poisson_sf((xi + vi) * V, M - 2) for vi in flat]).reshape(v_arr.shape)
    value = (K * np.exp(-v_arr * V) + (xi / (xi + v_arr)) ** (M - 1) * tail) / (1.0 + k * v_arr)
    return float(value) if value.ndim == 0 else value


def _lst_time_scalar(theta, p):
    if theta == 0.0:
        return 1.0
    lam, mu, a, b = p.lam, p.mu, p.a, p.b
    x = p.xi * p.V
    M = p.M
    d = (lam + b * theta) / (lam + theta)
    one_minus_d = a * theta / (lam + theta)
    dM = math.exp(M * math.log1p(-one_minus_d)) if one_minus_d < 1.0 else 0.0
    one_minus_K = poisson_sf(x, M - 2)
    third = d * math.exp(-x * one_minus_d) * poisson_cdf(d * x, M - 2)
    phi_t = (1.0 - dM * one_minus_K - third) / one_minus_d
    bracket = 1.0 + b * mu / (lam + b * theta) + a * lam * mu / ((lam + b * theta) * (lam + theta)) * phi_t
    return 1.0 - theta / (mu + theta) * bracket


def lst_time(theta, p: ModelParams):
    """E[e^{-theta tau}] for the first observed passage time."""
    th = np.asarray(theta, dtype=float)
    if th.ndim == 0:
        return _lst_time_scalar(float(th), p)
    return np.array([_lst_time_scalar(float(t), p) for t in th.ravel()]).reshape(th.shape)


def mean_nodes_at_crossing(p: ModelParams) -> float:
    """E[N] at the first observed passage.

    The ``(xi V)^j / (j-1)!`` sum has a zero j = 0 term, which leaves
    ``xi V P[Pois(xi V) <= M-3]``.
    """
    x = p.xi * p.V
    M = p.M
    return (
        (p.lam + p.b * p.mu) / (p.a * p.mu)
        + M
        - (M - 1) * poisson_cdf(x, M - 2)
        + x * poisson_cdf(x, M - 3)
    )


def mean_weight_at_crossing(p: ModelParams) -> float:
    return mean_nodes_at_crossing(p) / p.xi
