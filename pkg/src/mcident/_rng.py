"""Deterministic derivation of independent RNG streams from one root seed.

Substreams are keyed by (seed, tag...) where tags are small strings hashed
with crc32, which is stable across platforms and processes (unlike hash()).
"""

from __future__ import annotations

from zlib import crc32

import numpy as np


def derive_rng(seed: int, *tags: object) -> np.random.Generator:
    """RNG for the substream identified by (seed, *tags)."""
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF]
    for t in tags:
        entropy.append(crc32(repr(t).encode("utf8")))
    return np.random.default_rng(np.random.SeedSequence(entropy))
