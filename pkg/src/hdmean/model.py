"""Data-generating models in sequence space and the truncation operators.

An observation is the first ``d`` coordinates of an l2-valued sequence
``Z = mu + (sqrt(lambda_k) * eps_k)_k`` with i.i.d. standardised innovations
``eps_k``. The covariance operator is diagonal with eigenvalues
``lambda_k``, either ``c * k**-gamma`` or an explicit finite list (zeros beyond
its end). With ``rotate=True`` the covariance is conjugated by a fixed random
orthogonal matrix, which keeps the eigenvalues but makes it dense. The rotation
depends on ``d``, so rotated samples of different widths are not truncations of
one sequence.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import zeta

from .errors import InvalidModel
from .limitdist import WeightedChiSquare
from .rng import check_seed, standard_normal, stream

INNOVATIONS = ("gaussian", "rademacher", "student_t")
TRUNCATIONS = ("fixed", "power", "log")


@dataclass(frozen=True)
class SpectralModel:
    decay: str = "power"  # "power" or "list"
    c: float = 1.0
    gamma: float = 2.0
    eigenvalues: Optional[tuple] = None
    innovation: str = "gaussian"
    nu: float = 5.0
    shift: float = 0.0
    shift_direction: Optional[tuple] = None
    rotate: bool = False
    rotation_seed: int = 0

    def __post_init__(self):
        if self.decay == "power":
            if not (math.isfinite(self.c) and self.c > 0):
                raise InvalidModel(f"decay constant c must be > 0, got {self.c}")
            if not (math.isfinite(self.gamma) and self.gamma > 1):
                raise InvalidModel(f"decay exponent gamma must be > 1 for a finite trace, got {self.gamma}")
        elif self.decay == "list":
            if self.eigenvalues is None or len(self.eigenvalues) == 0:
                raise InvalidModel("decay 'list' needs a non-empty eigenvalues list")
            lam = tuple(float(v) for v in self.eigenvalues)
            if any(not math.isfinite(v) or v < 0 for v in lam):
                raise InvalidModel("eigenvalues must be finite and non-negative")
            object.__setattr__(self, "eigenvalues", lam)
        else:
            raise InvalidModel(f"unknown decay {self.decay!r}; expected 'power' or 'list'")
        if self.innovation not in INNOVATIONS:
            raise InvalidModel(f"unknown innovation {self.innovation!r}; expected one of {INNOVATIONS}")
        if self.innovation == "student_t" and not self.nu >= 3:
            raise InvalidModel(f"student_t needs nu >= 3 for a finite variance margin, got {self.nu}")
        if not math.isfinite(self.shift):
            raise InvalidModel("shift must be finite")
        if self.shift_direction is not None:
            e = np.asarray(self.shift_direction, dtype=np.float64).reshape(-1)
            norm = float(np.linalg.norm(e))
            if e.size == 0 or not np.all(np.isfinite(e)) or norm == 0:
                raise InvalidModel("shift_direction must be a finite non-zero vector")
            object.__setattr__(self, "shift_direction", tuple(float(v) for v in e / norm))
        check_seed(self.rotation_seed)

    def spectrum(self, d: int) -> np.ndarray:
        """``lambda_1, ..., lambda_d``."""
        if self.decay == "power":
            k = np.arange(1, d + 1, dtype=np.float64)
            return self.c * k**-self.gamma
        lam = np.zeros(d)
        m = min(d, len(self.eigenvalues))
        lam[:m] = self.eigenvalues[:m]
        return lam

    def tail(self, d: int) -> float:
        """``sum_{k > d} lambda_k``."""
        if self.decay == "power":
            return float(self.c * zeta(self.gamma, d + 1))
        return float(sum(self.eigenvalues[d:]))

    def limit(self, length: int) -> WeightedChiSquare:
        """The limit law truncated after ``length`` weights, tail mass recorded."""
        return WeightedChiSquare(self.spectrum(length), self.tail(length))

    def mean_vector(self, d: int) -> np.ndarray:
        mu = np.zeros(d)
        if self.shift == 0.0:
            return mu
        e = self.shift_direction or (1.0,)
        m = min(d, len(e))
        mu[:m] = self.shift * np.asarray(e[:m])
        return mu

    def rotation(self, d: int) -> np.ndarray:
        """Haar-distributed orthogonal ``d x d`` matrix fixed by ``rotation_seed``."""
        g = standard_normal(stream(self.rotation_seed, d), (d, d))
        q, r = np.linalg.qr(g)
        return q * np.where(np.diag(r) < 0, -1.0, 1.0)


def innovations(kind: str, nu: float, shape, rng: np.random.Generator) -> np.ndarray:
    """Mean-zero, unit-variance i.i.d. draws."""
    if kind == "gaussian":
        return standard_normal(rng, shape)
    if kind == "rademacher":
        return rng.integers(0, 2, size=shape).astype(np.float64) * 2.0 - 1.0
    if kind == "student_t":
        z = standard_normal(rng, shape)
        chi2 = 2.0 * rng.standard_gamma(nu / 2.0, size=shape)
        return z / np.sqrt(chi2 / nu) * math.sqrt((nu - 2.0) / nu)
    raise InvalidModel(f"unknown innovation {kind!r}")


def generate_sample(model: SpectralModel, n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` observations of the first ``d`` coordinates."""
    if n < 1 or d < 1:
        raise ValueError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
    eps = innovations(model.innovation, model.nu, (n, d), rng)
    x = eps * np.sqrt(model.spectrum(d))
    if model.rotate:
        x = x @ model.rotation(d).T
    return x + model.mean_vector(d)


@dataclass(frozen=True)
class TruncationRule:
    kind: str = "fixed"
    d: int = 1
    beta: float = 0.5

    def __post_init__(self):
        if self.kind not in TRUNCATIONS:
            raise ValueError(f"unknown truncation {self.kind!r}; expected one of {TRUNCATIONS}")
        if self.kind == "fixed" and (int(self.d) != self.d or self.d < 1):
            raise ValueError(f"fixed truncation needs d >= 1, got {self.d}")
        if self.kind == "power" and not 0 < self.beta:
            raise ValueError(f"power truncation needs beta > 0, got {self.beta}")


def dn_of(rule: TruncationRule, n: int) -> int:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if rule.kind == "fixed":
        return int(rule.d)
    if rule.kind == "power":
        # tolerance keeps exact powers exact, e.g. 1000 ** (1/3) = 9.999999999999998
        return max(1, math.floor(n**rule.beta + 1e-9))
    return max(1, math.floor(math.log2(n) + 1e-12))


def truncate(x, l: int) -> np.ndarray:
    """First ``l`` coordinates; a shorter ``x`` is read as zero-padded."""
    if l < 1:
        raise ValueError("truncation level must be >= 1")
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    out = np.zeros(l)
    m = min(l, x.size)
    out[:m] = x[:m]
    return out


def embed(v, target_len: int) -> np.ndarray:
    """Zero-pad ``v`` to ``target_len`` coordinates."""
    v = np.asarray(v, dtype=np.float64).reshape(-1)
    if target_len < v.size:
        raise ValueError(f"cannot embed length {v.size} into length {target_len}")
    out = np.zeros(target_len)
    out[: v.size] = v
    return out


def project(x, l: int) -> np.ndarray:
    """Orthogonal projection onto the first ``l`` unit vectors, same length as ``x``."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    return embed(truncate(x, l)[: min(l, x.size)], x.size)
