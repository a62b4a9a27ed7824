"""Model parameters, crossing records and the primitive samplers.

The attack process is a Poisson stream of rate ``lam``.  Each attack destroys
a geometric number of nodes with support {1, 2, ...} and PGF
``a z / (1 - b z)``; note the shift, an attack always takes at least one
node.  Every destroyed node carries an Exponential(``xi``) weight.  The
damage is only seen at observation epochs separated by Exponential(``mu``)
gaps, starting from an empty network at time 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from numbers import Integral, Real

import numpy as np

from .errors import NegativeMean, NonPositiveRate, ParameterOutOfRange, ThresholdInvalid


def _finite(name, value):
    if isinstance(value, bool) or not isinstance(value, Real):
        raise ParameterOutOfRange(f"{name} must be a real number, got {value!r}", param=name)
    value = float(value)
    if not math.isfinite(value):
        raise ParameterOutOfRange(f"{name} must be finite, got {value!r}", param=name)
    return value


@dataclass(frozen=True)
class ModelParams:
    """The six scalars of the Poisson/geometric/exponential model.

    ``m_beta`` is the value of the passive-component MGF at the chosen
    argument; the default of 1 switches the passive component off.
    """

    lam: float
    mu: float
    a: float
    xi: float
    M: int
    V: float
    m_beta: float = 1.0

    def __post_init__(self):
        for name in ("lam", "mu", "xi"):
            value = _finite(name, getattr(self, name))
            if value <= 0.0:
                raise NonPositiveRate(f"{name} must be > 0, got {value!r}", param=name)
            object.__setattr__(self, name, value)

        a = _finite("a", self.a)
        if not 0.0 < a <= 1.0:
            raise ParameterOutOfRange(f"a must lie in (0, 1], got {a!r}", param="a")
        object.__setattr__(self, "a", a)

        m_beta = _finite("m_beta", self.m_beta)
        if not 0.0 < m_beta <= 1.0:
            raise ParameterOutOfRange(f"m_beta must lie in (0, 1], got {m_beta!r}", param="m_beta")
        object.__setattr__(self, "m_beta", m_beta)

        M = self.M
        if isinstance(M, bool):
            raise ThresholdInvalid(f"M must be an integer >= 1, got {M!r}", param="M")
        if isinstance(M, Real) and not isinstance(M, Integral):
            if not (math.isfinite(M) and float(M).is_integer()):
                raise ThresholdInvalid(f"M must be an integer >= 1, got {M!r}", param="M")
            M = int(M)
        if not isinstance(M, Integral) or M < 1:
            raise ThresholdInvalid(f"M must be an integer >= 1, got {M!r}", param="M")
        object.__setattr__(self, "M", int(M))

        try:
            V = _finite("V", self.V)
        except ParameterOutOfRange as exc:
            raise ThresholdInvalid(str(exc), param="V") from None
        if V <= 0.0:
            raise ThresholdInvalid(f"V must be > 0, got {V!r}", param="V")
        object.__setattr__(self, "V", V)

    @property
    def b(self) -> float:
        return 1.0 - self.a

    def as_tuple(self):
        return (self.lam, self.mu, self.a, self.xi, self.M, self.V)


def validate_params(lam, mu, a, xi, M, V, m_beta=1.0) -> ModelParams:
    """Build a :class:`ModelParams`, raising a named error for the first violated bound."""
    return ModelParams(lam, mu, a, xi, M, V, m_beta)


@dataclass(frozen=True)
class CrossingRecord:
    """Exit data of one realization: the state just before and at the first observed passage."""

    rho: int
    tau_pre: float
    tau_post: float
    nodes_pre: int
    nodes_post: int
    weight_pre: float
    weight_post: float

    def check(self, params: ModelParams) -> bool:
        inside = self.nodes_pre < params.M and self.weight_pre < params.V
        outside = self.nodes_post >= params.M or self.weight_post >= params.V
        monotone = (
            self.nodes_post >= self.nodes_pre
            and self.weight_post >= self.weight_pre
            and self.tau_post > self.tau_pre >= 0.0
        )
        return inside and outside and monotone and self.rho >= 1


@dataclass(frozen=True)
class SummaryStats:
    count: int
    mean_nodes: float
    mean_weight: float
    mean_tau: float
    se_nodes: float
    se_weight: float
    se_tau: float

    @classmethod
    def from_records(cls, records) -> "SummaryStats":
        if not records:
            raise ValueError("at least one record is required")
        nodes = np.array([r.nodes_post for r in records], dtype=float)
        weight = np.array([r.weight_post for r in records], dtype=float)
        tau = np.array([r.tau_post for r in records], dtype=float)
        n = len(records)

        def se(x):
            # unbiased variance; a single realization has no spread estimate
            return float(np.std(x, ddof=1) / math.sqrt(n)) if n > 1 else 0.0

        return cls(
            count=n,
            mean_nodes=float(np.mean(nodes)),
            mean_weight=float(np.mean(weight)),
            mean_tau=float(np.mean(tau)),
            se_nodes=se(nodes),
            se_weight=se(weight),
            se_tau=se(tau),
        )


# -- samplers ---------------------------------------------------------------
#
# Thin wrappers over numpy's Generator.  They exist so the distribution
# conventions (rate vs scale, geometric support) are fixed in one place.


def make_rng(master_seed: int, *key: int) -> np.random.Generator:
    """Independent generator for the stream identified by ``(master_seed, *key)``."""
    seq = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(seq))


def sample_exponential(rate, rng, size=None):
    if not rate > 0:
        raise NonPositiveRate(f"rate must be > 0, got {rate!r}", param="rate")
    return rng.exponential(1.0 / rate, size)


def exponential_quantile(u, rate):
    """Inverse CDF of Exponential(rate)."""
    return -np.log1p(-np.asarray(u, dtype=float)) / rate


def sample_geometric(a, rng, size=None):
    """Nodes lost per attack: P(n = k) = a b^(k-1) for k >= 1."""
    if not 0.0 < a <= 1.0:
        raise ParameterOutOfRange(f"a must lie in (0, 1], got {a!r}", param="a")
    return rng.geometric(a, size)


def sample_poisson(mean, rng, size=None):
    """Poisson counts; numpy switches to transformed rejection for large means."""
    mean_arr = np.asarray(mean, dtype=float)
    if np.any(mean_arr < 0):
        raise NegativeMean(f"Poisson mean must be >= 0, got {mean!r}", param="mean")
    if not np.all(np.isfinite(mean_arr)):
        raise ParameterOutOfRange(f"Poisson mean must be finite, got {mean!r}", param="mean")
    return rng.poisson(mean, size)
