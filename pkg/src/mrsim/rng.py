"""Deterministic seeding utilities.

All randomness in the package flows through 64-bit seeds derived with
SplitMix64, so that per-trajectory / per-record substreams depend only on
(master seed, indices) and never on execution order or thread count.
"""

import numpy as np

_MASK = (1 << 64) - 1


def splitmix64(seed: int, *indices: int) -> int:
    """Hash (seed, *indices) into a well-mixed 64-bit value.

    Successive applications of the SplitMix64 finalizer; stable across
    platforms and runs.
    """
    z = seed & _MASK
    for idx in indices:
        z = (z + 0x9E3779B97F4A7C15 + (idx & _MASK)) & _MASK
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        z = z ^ (z >> 31)
    return z


def make_rng(seed: int, *indices: int) -> np.random.Generator:
    """Generator for the substream identified by (seed, *indices)."""
    return np.random.Generator(np.random.PCG64(splitmix64(seed, *indices)))
