"""Seed derivation.

Every random quantity in the package is drawn from a PCG64 stream keyed by a
master seed plus a tuple of integers (a kind tag, dimensions, a block index).
Streams are independent of call order, so results do not depend on how work
is scheduled.
"""

from __future__ import annotations

from collections.abc import Iterator

import numpy as np

SEED_MAX = 2**64 - 1

# Monte Carlo draws are generated in fixed-size blocks; block b of a run always
# holds items [b * BLOCK, (b + 1) * BLOCK) regardless of the total requested.
BLOCK = 256


def check_seed(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
    seed = int(seed)
    if not 0 <= seed <= SEED_MAX:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def stream(seed: int, *key: int) -> np.random.Generator:
    """Return the generator for ``(seed, *key)``."""
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def derive_seed(seed: int, *key: int) -> int:
    """A 64-bit child seed, e.g. for the d-th matrix draw of a sweep."""
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def blocks(seed: int, total: int, *key: int) -> Iterator[tuple[int, int, np.random.Generator]]:
    """Yield ``(start, stop, rng)`` covering ``range(total)`` in blocks.

    The generator for a block depends only on ``(seed, *key, block index)``.
    Callers must draw a full ``BLOCK`` worth of values from each generator and
    keep the first ``stop - start`` so that a longer run extends a shorter one.
    """
    for b, start in enumerate(range(0, total, BLOCK)):
        yield start, min(start + BLOCK, total), stream(seed, *key, b)
