"""Seed handling: every stochastic entry point takes a seed or Generator."""

from __future__ import annotations

import numpy as np


def as_generator(seed) -> np.random.Generator:
    """Coerce an int seed, SeedSequence, or Generator into a Generator.

    Passing a Generator returns it unchanged so callers can thread one
    stream through several draws; anything else starts a fresh PCG64
    stream, so identical seeds give identical draw sequences.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def child_seed(*keys: int) -> np.random.SeedSequence:
    """Deterministic child stream for (seed, rep, ...) fan-out."""
    return np.random.SeedSequence([int(k) for k in keys])


def derive_seed(*keys: int) -> int:
    """Deterministic integer seed for APIs that want a plain int."""
    return int(child_seed(*keys).generate_state(1)[0])
