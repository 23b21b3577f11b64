"""Portable seeded randomness for bit-reproducible splits.

All data-split randomness in this package is derived from a splitmix64 key
stream: element ``i`` of the stream for seed ``s`` is
``mix64(s + (i + 1) * GAMMA)`` (64-bit wrapping arithmetic).  A permutation
of ``n`` items is defined as the stable argsort of the first ``n`` keys; a
subsample is the first ``m`` items of that permutation.  Any implementation
of splitmix64 in any language reproduces these decisions exactly, which is
what makes exported split indices portable across components.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15

_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    """splitmix64 finalizer on a 64-bit integer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def key_stream(seed: int, n: int) -> np.ndarray:
    """First ``n`` splitmix64 outputs for ``seed`` as a uint64 array."""
    if n < 0:
        raise ValueError(f"stream length must be >= 0, got {n}")
    gamma = np.uint64(GAMMA)
    states = np.uint64(seed & MASK64) + np.arange(1, n + 1, dtype=np.uint64) * gamma
    z = states
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


def permutation(seed: int, n: int) -> np.ndarray:
    """Deterministic permutation of range(n): stable argsort of the key stream."""
    return np.argsort(key_stream(seed, n), kind="stable")


def shuffled(seed: int, items: np.ndarray) -> np.ndarray:
    """``items`` reordered by the seed's permutation of their positions."""
    items = np.asarray(items)
    return items[permutation(seed, len(items))]


def subsample(seed: int, items: np.ndarray, m: int) -> np.ndarray:
    """Deterministic sample of ``m`` items without replacement."""
    items = np.asarray(items)
    if not 0 <= m <= len(items):
        raise ValueError(f"cannot take {m} of {len(items)} items")
    return shuffled(seed, items)[:m]


def derive_seed(seed: int, lane: int, index: int = 0) -> int:
    """Child seed for (lane, index), decorrelated from the parent stream.

    Lanes keep the engine's consumers (per-run splits, corruption draws,
    detector init) from ever sharing keys with the split permutation itself.
    """
    z = mix64((seed & MASK64) ^ 0xA3AD398F1CB6D2E5)
    z = mix64(z + (lane & MASK64) * GAMMA)
    return mix64(z + (index & MASK64) * GAMMA)


# Engine lanes for derive_seed.
LANE_SPLIT = 1
LANE_CORRUPTION = 2
LANE_DETECTOR = 3
