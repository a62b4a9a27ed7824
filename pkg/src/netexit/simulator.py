"""Monte Carlo realizations of the attack/observation process up to exit.

Each realization draws from its own generator keyed by
``(master_seed, strategy, index)``, so a batch gives the same records no
matter how it is split across workers.

Two generation orders are provided:

* ``EPOCH_FIRST`` draws an observation gap, then the Poisson number of attacks
  inside it, then their node counts and node weights.
* ``ATTACK_FIRST`` lays down the marked attack stream on the time axis and
  reads it off at renewal observation times.

Both are vectorized over blocks of epochs (resp. attacks); the block schedule
depends only on the parameters, which keeps them deterministic.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import ks_2samp

from .analytic.transforms import mean_nodes_at_crossing
from .errors import EmptySample, NonTermination
from .model import CrossingRecord, ModelParams, SummaryStats, make_rng

MAX_EPOCHS = 10**9
MAX_BLOCK = 1 << 16


class Strategy(enum.Enum):
    EPOCH_FIRST = "epoch-first"
    ATTACK_FIRST = "attack-first"


_STRATEGY_KEY = {Strategy.EPOCH_FIRST: 0, Strategy.ATTACK_FIRST: 1}


@dataclass(frozen=True)
class RealizationConfig:
    params: ModelParams
    master_seed: int
    strategy: Strategy = Strategy.EPOCH_FIRST


def _first_block(p: ModelParams) -> int:
    # rough epoch count to exit: E[N] nodes at lam/(a mu) nodes per epoch
    expected = mean_nodes_at_crossing(p) * p.a * p.mu / p.lam
    return int(min(MAX_BLOCK, max(8, math.ceil(1.25 * expected) + 8)))


def _epoch_first(p: ModelParams, rng: np.random.Generator, first_block: int) -> CrossingRecord:
    M, V = p.M, p.V
    nodes, weight, tau, epochs = 0, 0.0, 0.0, 0
    block = first_block
    while epochs < MAX_EPOCHS:
        gaps = rng.exponential(1.0 / p.mu, block)
        strikes = rng.poisson(p.lam * gaps)
        per_attack = rng.geometric(p.a, int(strikes.sum()))
        node_weights = rng.exponential(1.0 / p.xi, int(per_attack.sum()))

        # cumulative nodes / weight at the end of every epoch in the block
        nodes_by_attack = np.concatenate(([0], np.cumsum(per_attack)))
        n_end = nodes_by_attack[np.cumsum(strikes)]
        w_by_node = np.concatenate(([0.0], np.cumsum(node_weights)))
        N = nodes + n_end
        W = weight + w_by_node[n_end]
        T = tau + np.cumsum(gaps)

        out = (N >= M) | (W >= V)
        if out.any():
            k = int(np.argmax(out))
            if k == 0:
                pre = (tau, nodes, weight)
            else:
                pre = (float(T[k - 1]), int(N[k - 1]), float(W[k - 1]))
            return CrossingRecord(
                rho=epochs + k + 1,
                tau_pre=pre[0],
                tau_post=float(T[k]),
                nodes_pre=pre[1],
                nodes_post=int(N[k]),
                weight_pre=pre[2],
                weight_post=float(W[k]),
            )
        nodes, weight, tau = int(N[-1]), float(W[-1]), float(T[-1])
        epochs += block
        block = min(2 * block, MAX_BLOCK)
    raise NonTermination(f"no exit within {MAX_EPOCHS} epochs for {p}")


class _AttackStream:
    """Marked Poisson attacks, generated in blocks and consumed in time order.

    Only attacks not yet read off by an observation are kept.
    """

    def __init__(self, p: ModelParams, rng: np.random.Generator, block: int):
        self.p = p
        self.rng = rng
        self.block = block
        self.clock = 0.0
        self.times = np.zeros(0)
        self.nodes = np.zeros(0, dtype=np.int64)
        self.weights = np.zeros(0)

    def _extend(self):
        p, rng = self.p, self.rng
        times = self.clock + np.cumsum(rng.exponential(1.0 / p.lam, self.block))
        per_attack = rng.geometric(p.a, self.block)
        node_weights = rng.exponential(1.0 / p.xi, int(per_attack.sum()))
        starts = np.concatenate(([0], np.cumsum(per_attack)[:-1]))
        self.clock = float(times[-1])
        self.times = np.concatenate((self.times, times))
        self.nodes = np.concatenate((self.nodes, per_attack))
        self.weights = np.concatenate((self.weights, np.add.reduceat(node_weights, starts)))
        self.block = min(2 * self.block, MAX_BLOCK)

    def take_until(self, horizon: float):
        """Attacks buffered or generated with time <= horizon must be visible."""
        while self.clock <= horizon:
            self._extend()

    def consume(self, count: int):
        self.times = self.times[count:]
        self.nodes = self.nodes[count:]
        self.weights = self.weights[count:]


def _attack_first(p: ModelParams, rng: np.random.Generator, first_block: int) -> CrossingRecord:
    M, V = p.M, p.V
    stream = _AttackStream(p, rng, max(8, int(first_block * p.lam / p.mu)))
    nodes, weight, tau, epochs = 0, 0.0, 0.0, 0
    block = first_block
    while epochs < MAX_EPOCHS:
        T = tau + np.cumsum(rng.exponential(1.0 / p.mu, block))
        stream.take_until(float(T[-1]))
        seen = np.searchsorted(stream.times, T, side="right")
        cum_nodes = np.concatenate(([0], np.cumsum(stream.nodes)))
        cum_weight = np.concatenate(([0.0], np.cumsum(stream.weights)))
        N = nodes + cum_nodes[seen]
        W = weight + cum_weight[seen]

        out = (N >= M) | (W >= V)
        if out.any():
            k = int(np.argmax(out))
            if k == 0:
                pre = (tau, nodes, weight)
            else:
                pre = (float(T[k - 1]), int(N[k - 1]), float(W[k - 1]))
            return CrossingRecord(
                rho=epochs + k + 1,
                tau_pre=pre[0],
                tau_post=float(T[k]),
                nodes_pre=pre[1],
                nodes_post=int(N[k]),
                weight_pre=pre[2],
                weight_post=float(W[k]),
            )
        nodes, weight, tau = int(N[-1]), float(W[-1]), float(T[-1])
        stream.consume(int(seen[-1]))
        epochs += block
        block = min(2 * block, MAX_BLOCK)
    raise NonTermination(f"no exit within {MAX_EPOCHS} epochs for {p}")


_GENERATORS = {Strategy.EPOCH_FIRST: _epoch_first, Strategy.ATTACK_FIRST: _attack_first}


def _run(cfg: RealizationConfig, index: int, first_block: int) -> CrossingRecord:
    rng = make_rng(cfg.master_seed, _STRATEGY_KEY[cfg.strategy], index)
    return _GENERATORS[cfg.strategy](cfg.params, rng, first_block)


def simulate_realization(cfg: RealizationConfig, index: int) -> CrossingRecord:
    """One realization, fully determined by ``(cfg.master_seed, cfg.strategy, index)``."""
    if index < 0:
        raise ValueError(f"index must be >= 0, got {index}")
    return _run(cfg, index, _first_block(cfg.params))


def _run_range(cfg: RealizationConfig, start: int, stop: int):
    first_block = _first_block(cfg.params)
    return [_run(cfg, i, first_block) for i in range(start, stop)]


def simulate_records(cfg: RealizationConfig, n: int, workers: int = 1) -> list[CrossingRecord]:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if workers <= 1 or n < 2 * workers:
        return _run_range(cfg, 0, n)
    chunk = math.ceil(n / (4 * workers))
    bounds = [(s, min(s + chunk, n)) for s in range(0, n, chunk)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(_run_range, [cfg] * len(bounds), *zip(*bounds))
        return [rec for part in parts for rec in part]


def simulate_batch(cfg: RealizationConfig, n: int, workers: int = 1):
    """``n`` realizations (indices 0..n-1) and their summary."""
    records = simulate_records(cfg, n, workers)
    return SummaryStats.from_records(records), records


def crossing_arrays(records):
    """(nodes, weight, tau) at the first observed passage as float arrays."""
    nodes = np.array([r.nodes_post for r in records], dtype=float)
    weight = np.array([r.weight_post for r in records], dtype=float)
    tau = np.array([r.tau_post for r in records], dtype=float)
    return nodes, weight, tau


@dataclass(frozen=True)
class StrategyComparison:
    n: int
    ks_nodes: float
    ks_weight: float
    ks_tau: float
    critical_1pct: float

    @property
    def passed(self) -> bool:
        return max(self.ks_nodes, self.ks_weight, self.ks_tau) < self.critical_1pct


def ks_critical_1pct(n: int, m: int | None = None) -> float:
    """Asymptotic 1% critical value of the two-sample KS statistic."""
    m = n if m is None else m
    return 1.628 * math.sqrt((n + m) / (n * m))


def strategy_equivalence_check(p: ModelParams, n: int, seed: int, workers: int = 1):
    """Two-sample KS statistics between the two generation orders.

    The strategies draw from different streams even for the same seed, so the
    samples are independent; only their distributions are expected to agree.
    """
    a = crossing_arrays(simulate_records(RealizationConfig(p, seed, Strategy.EPOCH_FIRST), n, workers))
    b = crossing_arrays(simulate_records(RealizationConfig(p, seed, Strategy.ATTACK_FIRST), n, workers))
    stats = [float(ks_2samp(x, y).statistic) for x, y in zip(a, b)]
    return StrategyComparison(n, *stats, critical_1pct=ks_critical_1pct(n))


@dataclass(frozen=True)
class EmpiricalCdf:
    """Right-continuous step function of a sample."""

    support: np.ndarray
    fractions: np.ndarray

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self.support, x, side="right")
        out = np.where(idx > 0, self.fractions[np.maximum(idx - 1, 0)], 0.0)
        return float(out) if out.ndim == 0 else out


def empirical_cdf(samples) -> EmpiricalCdf:
    data = np.sort(np.asarray(samples, dtype=float).ravel())
    if data.size == 0:
        raise EmptySample("empirical CDF needs at least one sample")
    support, counts = np.unique(data, return_counts=True)
    return EmpiricalCdf(support=support, fractions=np.cumsum(counts) / data.size)
