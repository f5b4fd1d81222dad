"""Finite-sample versions of the conditions behind the limit theorems.

All quantities are computed under the empirical measure of the sample, the
law the bootstrap resamples from, so they are exactly the conditions the
bootstrap array has to satisfy. Diagnostics are descriptive. Nothing here
blocks a test from running.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import IndexOutOfRange
from .linalg import as_sample, centered

DEFAULT_EPSILON_GRID = tuple(2.0**k for k in range(-4, 5))
DEFAULT_COV_DIAGONAL = 10  # diagonal entries reported when none are requested


def _check_eps(eps: float) -> float:
    eps = float(eps)
    if not (math.isfinite(eps) and eps > 0):
        raise ValueError(f"epsilon must be positive, got {eps}")
    return eps


def lindeberg_term(sample, epsilon: float) -> float:
    """``n^-1 sum_i ||X_i - Xbar||**2 * 1{||X_i - Xbar|| > epsilon sqrt(n)}``."""
    return float(lindeberg_terms(sample, [epsilon])[0])


def lindeberg_terms(sample, epsilons: Sequence[float]) -> np.ndarray:
    xc = centered(sample)
    n = xc.shape[0]
    sq = np.einsum("ij,ij->i", xc, xc)
    norms = np.sqrt(sq)
    out = np.empty(len(epsilons))
    for i, eps in enumerate(epsilons):
        out[i] = sq[norms > _check_eps(eps) * math.sqrt(n)].sum() / n
    return out


def covariance_entry(sample, k: int, l: int) -> float:
    """Centred cross moment of coordinates ``k`` and ``l`` (1-based)."""
    x = as_sample(sample)
    n, d = x.shape
    for idx in (k, l):
        if not 1 <= idx <= d:
            raise IndexOutOfRange(f"coordinate {idx} outside 1..{d}")
    xc = centered(x)
    return float(np.dot(xc[:, k - 1], xc[:, l - 1]) / n)


def trace_condition(sample) -> float:
    """``sum_k Gamma_n(k, k)``, cross-checked against ``n^-1 sum ||X_i||**2 - ||Xbar||**2``."""
    x = as_sample(sample)
    n = x.shape[0]
    xc = centered(x)
    diag_sum = float(np.sum(xc * xc) / n)
    second = float(np.sum(x * x) / n)
    xbar = x.sum(axis=0) / n
    identity = second - float(np.dot(xbar, xbar))
    if abs(diag_sum - identity) > 1e-10 * (1.0 + second):
        raise ArithmeticError(f"trace formulas disagree: {diag_sum!r} vs {identity!r}")
    return diag_sum


@dataclass(frozen=True)
class DiagnosticsReport:
    lindeberg: dict = field(default_factory=dict)  # epsilon -> L_n(epsilon)
    trace_sum: float = 0.0
    cov_entries: dict = field(default_factory=dict)  # (k, l) -> Gamma_n(k, l)
    n: int = 0
    d: int = 0
    l_projection: int = 0

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "l_projection": self.l_projection,
            "trace_sum": self.trace_sum,
            "lindeberg": {repr(float(e)): v for e, v in self.lindeberg.items()},
            "cov_entries": {f"{k},{l}": v for (k, l), v in self.cov_entries.items()},
        }


def full_report(
    sample,
    epsilon_grid: Sequence[float] = DEFAULT_EPSILON_GRID,
    l_projection: Optional[int] = None,
    cov_pairs: Optional[Sequence[tuple]] = None,
) -> DiagnosticsReport:
    """Lindeberg terms on the first ``l_projection`` coordinates, trace and covariance entries.

    ``l_projection`` defaults to ``d``; ``cov_pairs`` defaults to the leading
    diagonal entries.
    """
    x = as_sample(sample)
    n, d = x.shape
    grid = [_check_eps(e) for e in epsilon_grid]
    if not grid:
        raise ValueError("epsilon grid must not be empty")
    l = d if l_projection is None else int(l_projection)
    if not 1 <= l <= d:
        raise IndexOutOfRange(f"projection level l={l} outside 1..{d}")
    if cov_pairs is None:
        cov_pairs = [(k, k) for k in range(1, min(l, DEFAULT_COV_DIAGONAL) + 1)]
    lind = lindeberg_terms(x[:, :l], grid)
    return DiagnosticsReport(
        lindeberg={e: float(v) for e, v in zip(grid, lind)},
        trace_sum=trace_condition(x),
        cov_entries={(int(k), int(j)): covariance_entry(x, k, j) for k, j in cov_pairs},
        n=n,
        d=d,
        l_projection=l,
    )
