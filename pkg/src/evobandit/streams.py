"""Deterministic random streams derived from a master seed.

All simulation randomness flows through uniform variates in [0, 1). Streams
are split counter-style: a master seed plus an integer key tuple yields an
independent stream, so replications can run in any order (or in parallel)
without changing results.
"""

from __future__ import annotations

import random

import numpy as np

__all__ = ["uniform_stream", "numpy_stream", "spawn_seed"]


def spawn_seed(seed: int, *key: int) -> int:
    """Derive a well-mixed 64-bit child seed from (seed, key...)."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=tuple(key))
    state = ss.generate_state(2, dtype=np.uint64)
    return int(state[0])


def uniform_stream(seed: int, *key: int) -> random.Random:
    """A seeded generator of uniform variates in [0, 1).

    ``random.Random`` is used for the scalar per-step draws in the simulation
    loop; the child seed comes from a SeedSequence split so streams with
    different keys are statistically independent.
    """
    return random.Random(spawn_seed(seed, *key))


def numpy_stream(seed: int, *key: int) -> np.random.Generator:
    """A seeded numpy Generator for vectorised sampling."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=tuple(key)))
