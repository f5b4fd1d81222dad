"""Weighted chi-square reference laws and empirical distribution functions."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import zeta

from .errors import InvalidProbability, NotPositiveSemidefinite
from .linalg import eigen_symmetric
from .rng import standard_normal

# Normals drawn per block when sampling; fixed so output does not depend on m's split.
_BLOCK_ELEMENTS = 1 << 20
PSD_TOL = 1e-10


@dataclass(frozen=True)
class WeightedChiSquare:
    """The law of ``sum_i lambdas[i] * N_i**2`` with i.i.d. standard normals.

    ``truncation_tail`` records the weight mass dropped when an infinite
    spectrum was cut to a finite list; it is bookkeeping only and does not
    enter the sampler.
    """

    lambdas: np.ndarray
    truncation_tail: float = 0.0

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=np.float64).reshape(-1)
        if lam.size and (not np.all(np.isfinite(lam)) or np.any(lam < 0)):
            raise ValueError("weights must be finite and non-negative")
        if not (math.isfinite(self.truncation_tail) and self.truncation_tail >= 0):
            raise ValueError("truncation_tail must be finite and non-negative")
        object.__setattr__(self, "lambdas", lam)

    @property
    def trace(self) -> float:
        return float(self.lambdas.sum())

    @property
    def variance(self) -> float:
        return float(2.0 * np.sum(self.lambdas**2))


def power_law_spectrum(c: float, gamma: float, length: int) -> WeightedChiSquare:
    """First ``length`` weights of ``c * i**-gamma``, with the Hurwitz-zeta tail."""
    i = np.arange(1, length + 1, dtype=np.float64)
    return WeightedChiSquare(c * i**-gamma, float(c * zeta(gamma, length + 1)))


def sample_weighted_chisquare(model: WeightedChiSquare, m: int, rng: np.random.Generator) -> np.ndarray:
    if m < 1:
        raise ValueError("m must be >= 1")
    lam = model.lambdas
    if lam.size == 0:
        return np.zeros(m)
    out = np.empty(m)
    rows = max(1, _BLOCK_ELEMENTS // lam.size)
    for start in range(0, m, rows):
        stop = min(m, start + rows)
        z = standard_normal(rng, (stop - start, lam.size))
        out[start:stop] = (z * z) @ lam
    return out


def limit_from_covariance(gamma) -> WeightedChiSquare:
    """Limit law of ``n * ||Xbar||**2`` for data with covariance ``gamma``.

    Eigenvalues slightly below zero from rounding are clamped; anything
    below ``-1e-10 * (1 + max|lambda|)`` means ``gamma`` is not a covariance.
    """
    w = eigen_symmetric(gamma).eigenvalues
    floor = -PSD_TOL * (1.0 + float(np.max(np.abs(w))))
    if w.min() < floor:
        raise NotPositiveSemidefinite(f"matrix has eigenvalue {w.min():.3e}")
    return WeightedChiSquare(np.clip(w, 0.0, None))


@dataclass(frozen=True)
class EmpiricalCdf:
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.sort(np.asarray(self.values, dtype=np.float64).reshape(-1), kind="stable")
        if v.size == 0:
            raise ValueError("empirical CDF needs at least one value")
        object.__setattr__(self, "values", v)

    @property
    def size(self) -> int:
        return int(self.values.size)

    def cdf(self, x):
        """``#{values <= x} / size``; accepts scalars or arrays."""
        r = np.searchsorted(self.values, x, side="right") / self.size
        return float(r) if np.ndim(r) == 0 else r

    __call__ = cdf

    def quantile(self, p: float) -> float:
        """Upper empirical quantile: the order statistic of rank ``ceil(p * size)``."""
        return float(self.values[quantile_rank(p, self.size) - 1])


def quantile_rank(p: float, size: int) -> int:
    """1-based rank ``ceil(p * size)``, clamped to ``[1, size]``."""
    if not 0.0 < p < 1.0:
        raise InvalidProbability(f"probability must lie in (0, 1), got {p}")
    # absorb representation error such as 0.95 * 2000 = 1900.0000000000002
    k = math.ceil(p * size - 1e-9)
    return min(max(k, 1), size)


def _as_ecdf(x) -> EmpiricalCdf:
    return x if isinstance(x, EmpiricalCdf) else EmpiricalCdf(x)


def ks_distance(a, b) -> float:
    """Exact ``sup_x |F_a(x) - F_b(x)|`` between two empirical CDFs.

    Both step functions only jump on the merged sample points, so the
    supremum is attained at one of them, either at the point itself or as
    the left limit just before it.
    """
    a, b = _as_ecdf(a), _as_ecdf(b)
    pts = np.unique(np.concatenate([a.values, b.values]))
    right = np.abs(
        np.searchsorted(a.values, pts, side="right") / a.size
        - np.searchsorted(b.values, pts, side="right") / b.size
    )
    left = np.abs(
        np.searchsorted(a.values, pts, side="left") / a.size
        - np.searchsorted(b.values, pts, side="left") / b.size
    )
    return float(max(right.max(), left.max()))
