"""Seeded random streams.

All stochastic code in this package draws from numpy Generators backed by
PCG64. Given the same seed the stream is identical on every platform, which is
what makes routing decisions and simulation campaigns replayable. Substreams
are derived through SeedSequence so concurrent episodes never share state.
"""

from __future__ import annotations

import numpy as np

RandomSource = np.random.Generator


def make_rng(seed: int) -> RandomSource:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


def derive(seed: int, *path: int) -> RandomSource:
    """Independent stream for (seed, path). Same arguments, same stream."""
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence([int(seed), *map(int, path)]))
    )


def split(seed: int, n: int) -> list[RandomSource]:
    children = np.random.SeedSequence(int(seed)).spawn(n)
    return [np.random.Generator(np.random.PCG64(c)) for c in children]
