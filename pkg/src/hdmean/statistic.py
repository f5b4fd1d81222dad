"""The statistic ``V_n = n ||Xbar - mu0||^2`` and its Efron bootstrap calibration.

Replicate ``j`` of a bootstrap run always draws its indices from
``rng.stream(seed, j)``. Replicates are evaluated in blocks whose size depends
only on ``n``, so thread count changes who computes a block but never what
it contains.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DimensionMismatch
from .limitdist import quantile_rank
from .linalg import as_sample, centered
from .rng import check_seed, stream

_BLOCK_CELLS = 1 << 21  # cap on the (replicates x n) count matrix per block


@dataclass(frozen=True)
class TestConfig:
    __test__ = False  # not a pytest class

    alpha: float = 0.05
    b_replicates: int = 2000
    seed: int = 0
    mu0: Optional[tuple] = None

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if isinstance(self.b_replicates, bool) or int(self.b_replicates) != self.b_replicates or self.b_replicates < 1:
            raise ValueError(f"b_replicates must be an integer >= 1, got {self.b_replicates}")
        object.__setattr__(self, "seed", check_seed(self.seed))
        if self.mu0 is not None:
            mu0 = tuple(float(v) for v in np.asarray(self.mu0, dtype=np.float64).reshape(-1))
            if not all(math.isfinite(v) for v in mu0):
                raise ValueError("mu0 must be finite")
            object.__setattr__(self, "mu0", mu0)


@dataclass(frozen=True)
class BootstrapResult:
    replicates: np.ndarray = field(repr=False)
    quantile: float
    p_value: float
    statistic: float
    reject: bool
    alpha: float
    seed: int

    @property
    def b_replicates(self) -> int:
        return int(self.replicates.size)

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "quantile": self.quantile,
            "p_value": self.p_value,
            "reject": self.reject,
            "alpha": self.alpha,
            "B": self.b_replicates,
            "seed": self.seed,
        }


def _resolve_mu0(mu0, d: int) -> np.ndarray:
    if mu0 is None:
        return np.zeros(d)
    mu0 = np.asarray(mu0, dtype=np.float64).reshape(-1)
    if mu0.size != d:
        raise DimensionMismatch(f"mu0 has length {mu0.size} but the sample has d = {d}")
    return mu0


def v_statistic(sample, mu0=None) -> float:
    """``n * ||mean(X - mu0)||**2``; the data are shifted by ``mu0`` first."""
    x = as_sample(sample)
    n = x.shape[0]
    xbar = (x - _resolve_mu0(mu0, x.shape[1])).sum(axis=0) / n
    return float(n * np.dot(xbar, xbar))


def _block_values(xc: np.ndarray, gens) -> np.ndarray:
    n = xc.shape[0]
    counts = np.empty((len(gens), n))
    for r, g in enumerate(gens):
        counts[r] = np.bincount(g.integers(0, n, size=n), minlength=n)
    s = counts @ xc  # resampled sums of centred rows
    return np.einsum("ij,ij->i", s, s) / n


def bootstrap_replicate(sample, rng: np.random.Generator) -> float:
    """One draw of ``n ||n^-1 sum_k (X_{i_k} - Xbar)||**2`` with uniform indices."""
    return float(_block_values(centered(sample), [rng])[0])


def bootstrap_replicates(sample, seed: int, b: int, workers: int = 1) -> np.ndarray:
    """Replicates ``0..b-1`` of the centred bootstrap statistic."""
    xc = centered(sample)
    seed = check_seed(seed)
    n = xc.shape[0]
    block = max(1, min(256, _BLOCK_CELLS // n))
    starts = range(0, b, block)

    def run(start: int) -> np.ndarray:
        return _block_values(xc, [stream(seed, j) for j in range(start, min(b, start + block))])

    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, starts))
    else:
        parts = [run(s) for s in starts]
    return np.concatenate(parts)


def critical_value(sorted_replicates: np.ndarray, alpha: float) -> float:
    """Order statistic of rank ``ceil((1 - alpha) B)`` of ascending replicates."""
    return float(sorted_replicates[quantile_rank(1.0 - alpha, sorted_replicates.size) - 1])


def p_value(sorted_replicates: np.ndarray, statistic: float) -> float:
    b = sorted_replicates.size
    exceed = b - int(np.searchsorted(sorted_replicates, statistic, side="left"))
    return (1 + exceed) / (b + 1)


def bootstrap_distribution(sample, config: TestConfig, workers: int = 1) -> BootstrapResult:
    x = as_sample(sample)
    stat = v_statistic(x, config.mu0)
    reps = bootstrap_replicates(x, config.seed, config.b_replicates, workers=workers)
    ordered = np.sort(reps)
    q = critical_value(ordered, config.alpha)
    return BootstrapResult(
        replicates=reps,
        quantile=q,
        p_value=p_value(ordered, stat),
        statistic=stat,
        reject=bool(stat > q),
        alpha=config.alpha,
        seed=config.seed,
    )


def run_test(sample, config: TestConfig, workers: int = 1) -> BootstrapResult:
    """Bootstrap test of ``H0: E[X] = mu0``; rejects when ``V_n`` exceeds the critical value.

    Works unchanged for truncated high-dimensional data: pass the first
    ``d_n`` columns as the sample.
    """
    return bootstrap_distribution(sample, config, workers=workers)
