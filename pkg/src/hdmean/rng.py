"""Seed derivation and random variates shared by every sampler.

A stream is identified by a master seed plus a key path of non-negative
integers, e.g. ``(seed, j)`` for bootstrap replicate ``j`` or
``(seed, kind, n_index, dataset_index)`` for a harness cell. The mapping is
``numpy.random.SeedSequence(seed, spawn_key=path)`` feeding a PCG64 bit
generator, so a stream depends only on its path and never on execution order.

Standard normals come from the Box-Muller transform of PCG64 uniforms rather
than numpy's ziggurat sampler, which keeps the normal generator table-free and
easy to reproduce elsewhere.
"""
from __future__ import annotations

import math

import numpy as np

MAX_SEED = 2**64 - 1


def check_seed(seed) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be in [0, 2**64), got {seed}")
    return seed


def stream(seed: int, *path: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=path)))


def derive_seed(seed: int, *path: int) -> int:
    """A 64-bit seed for the child identified by ``path``."""
    ss = np.random.SeedSequence(seed, spawn_key=path)
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def standard_normal(rng: np.random.Generator, size) -> np.ndarray:
    """I.i.d. N(0, 1) draws by the Box-Muller transform."""
    shape = (size,) if isinstance(size, (int, np.integer)) else tuple(size)
    count = math.prod(shape)
    pairs = (count + 1) // 2
    u1 = 1.0 - rng.random(pairs)  # (0, 1], keeps log finite
    u2 = rng.random(pairs)
    r = np.sqrt(-2.0 * np.log(u1))
    theta = 2.0 * np.pi * u2
    z = np.empty(2 * pairs)
    z[0::2] = r * np.cos(theta)
    z[1::2] = r * np.sin(theta)
    return z[:count].reshape(shape)
