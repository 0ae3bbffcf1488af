"""Counter-derived random substreams.

Every stochastic quantity in the package is drawn from a generator that is a
pure function of ``(master seed, key...)``.  Monte Carlo loops are split into
fixed-size chunks keyed by chunk index, so results do not depend on the
number of workers or on the order in which chunks are evaluated.
"""

from __future__ import annotations

import zlib
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np

CHUNK_SIZE = 1000


def key_of(text: str) -> int:
    """Stable non-negative integer key for a string label."""
    return zlib.crc32(text.encode("utf-8"))


def substream(seed: int, *keys: int) -> np.random.Generator:
    """Return the generator for substream ``keys`` of master ``seed``."""
    if seed < 0:
        raise ValueError("seed must be non-negative")
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.PCG64(ss))


def replicate(
    fn: Callable[[np.random.Generator, int], np.ndarray],
    reps: int,
    seed: int,
    keys: tuple[int, ...] = (),
    workers: int = 1,
) -> np.ndarray:
    """Evaluate ``fn(rng, size)`` over fixed chunks and concatenate.

    ``fn`` must return an array whose first axis has length ``size``.
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    n_chunks = -(-reps // CHUNK_SIZE)
    sizes = [min(CHUNK_SIZE, reps - c * CHUNK_SIZE) for c in range(n_chunks)]

    def run(c: int) -> np.ndarray:
        return np.asarray(fn(substream(seed, *keys, c), sizes[c]))

    if workers > 1 and n_chunks > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(n_chunks)))
    else:
        parts = [run(c) for c in range(n_chunks)]
    return np.concatenate(parts, axis=0)
