"""Dense linear algebra kernels: means, biased covariance, symmetric eigensolver.

Samples are plain ``numpy`` arrays of shape ``(n, d)``; rows are observations.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import InvalidSample, NonConvergence

MAX_SWEEPS = 100
OFF_TOL = 1e-12


def as_sample(data) -> np.ndarray:
    """Validate ``data`` as an ``(n, d)`` float matrix with finite entries.

    A 1-D input is read as a single column (``d = 1``).
    """
    x = np.asarray(data, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise InvalidSample(f"sample must be 2-D, got shape {x.shape}")
    n, d = x.shape
    if n < 1 or d < 1:
        raise InvalidSample(f"sample needs n >= 1 and d >= 1, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        bad = np.argwhere(~np.isfinite(x))[0]
        raise InvalidSample(f"non-finite entry at row {bad[0] + 1}, column {bad[1] + 1}")
    return x


def as_symmetric(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise InvalidSample(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidSample("matrix has non-finite entries")
    if not np.array_equal(a, a.T):
        raise InvalidSample("matrix is not symmetric")
    return a


def mean(sample) -> np.ndarray:
    x = as_sample(sample)
    return x.sum(axis=0) / x.shape[0]


def centered(sample) -> np.ndarray:
    """Rows minus the sample mean.

    The first row is subtracted before averaging, so a constant column
    centres to exact zeros and large common offsets do not cost precision.
    """
    x = as_sample(sample)
    y = x - x[0]
    return y - y.sum(axis=0) / x.shape[0]


def sample_covariance_biased(sample) -> np.ndarray:
    """Covariance with divisor ``n``: ``n^-1 sum X_i X_i' - Xbar Xbar'``.

    Computed from centred rows, which equals the moment form algebraically
    and loses less precision. The result is exactly symmetric.
    """
    x = as_sample(sample)
    xc = centered(x)
    cov = xc.T @ xc / x.shape[0]
    return np.triu(cov) + np.triu(cov, 1).T


class Spectrum(NamedTuple):
    eigenvalues: np.ndarray  # descending
    eigenvectors: np.ndarray  # columns


def _round_robin(d: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Pairings of {0..d-1} into disjoint (p, q) pairs, one list per round.

    Circle-method tournament: every pair appears exactly once per sweep.
    """
    m = d + (d % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for i in range(m // 2):
            p, q = players[i], players[m - 1 - i]
            if p < d and q < d:
                ps.append(min(p, q))
                qs.append(max(p, q))
        if ps:
            rounds.append((np.array(ps), np.array(qs)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _off_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def eigen_symmetric(a, max_sweeps: int = MAX_SWEEPS, tol: float = OFF_TOL) -> Spectrum:
    """Eigen-decomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Each sweep visits every off-diagonal pair once, in round-robin order so
    that the rotations of one round touch disjoint rows and can be applied
    together. Iteration stops once the off-diagonal Frobenius norm falls to
    ``tol * (1 + ||A||_F)``.

    Raises:
        NonConvergence: the threshold was not reached within ``max_sweeps``.
    """
    a = as_symmetric(a).copy()
    d = a.shape[0]
    v = np.eye(d)
    threshold = tol * (1.0 + float(np.linalg.norm(a)))
    rounds = _round_robin(d)
    off = _off_norm(a)
    sweeps = 0
    while off > threshold:
        if sweeps == max_sweeps:
            raise NonConvergence(
                f"Jacobi did not converge in {max_sweeps} sweeps "
                f"(off-diagonal norm {off:.3e} > {threshold:.3e})"
            )
        for p, q in rounds:
            apq = a[p, q]
            active = apq != 0.0
            if not np.any(active):
                continue
            p, q, apq = p[active], q[active], apq[active]
            # tan of the rotation angle, smaller root; written without tau**2 to avoid overflow
            diff = a[q, q] - a[p, p]
            t = np.where(diff >= 0, 2.0, -2.0) * apq / (np.abs(diff) + np.hypot(diff, 2.0 * apq))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            # A <- J' A J with J the product of the disjoint plane rotations
            rp, rq = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * rp - s[:, None] * rq
            a[q, :] = s[:, None] * rp + c[:, None] * rq
            cp, cq = a[:, p].copy(), a[:, q].copy()
            a[:, p] = cp * c - cq * s
            a[:, q] = cp * s + cq * c
            a[p, q] = 0.0
            a[q, p] = 0.0
            vp, vq = v[:, p].copy(), v[:, q].copy()
            v[:, p] = vp * c - vq * s
            v[:, q] = vp * s + vq * c
        a = 0.5 * (a + a.T)
        sweeps += 1
        off = _off_norm(a)
    w = np.diag(a).copy()
    order = np.argsort(-w, kind="stable")
    return Spectrum(w[order], v[:, order])
