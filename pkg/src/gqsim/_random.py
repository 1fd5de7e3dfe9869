"""Named, seed-derived random streams."""

import zlib

import numpy as np


def rng_stream(seed: int, name: str, *index: int) -> np.random.Generator:
    """Independent generator for ``(seed, name, *index)``.

    Streams with different names never share state, so adding a new consumer
    does not perturb existing ones.
    """
    key = [int(seed) & 0xFFFFFFFFFFFFFFFF, zlib.crc32(name.encode()), *map(int, index)]
    return np.random.default_rng(np.random.SeedSequence(key))
