#!/usr/bin/env python3
"""
Reproducible random streams.

Every Gaussian draw in the toolkit comes from a counter-based Philox
generator keyed by (seed, stream, index). Component k of a mixture always
reads stream (COMPONENT, k), so its noise does not depend on how many other
components are present or in which order they are listed.
"""

from typing import Tuple

import numpy as np

from lib.errors import require

# Stream identifiers for SeedSequence spawn keys
COMPONENT = 0
DENSE = 1
INITIAL = 2
PATH = 3

SEED_LIMIT = 2**64


def check_seed(seed: int) -> int:
    """Validate a 64-bit unsigned seed."""
    require(
        isinstance(seed, (int, np.integer)) and 0 <= int(seed) < SEED_LIMIT,
        f"seed={seed!r} must be an integer in [0, 2**64)",
    )
    return int(seed)


def seed_sequence(seed: int, stream: int, index: int = 0) -> np.random.SeedSequence:
    """Build the SeedSequence for one (seed, stream, index) triple."""
    return np.random.SeedSequence(entropy=check_seed(seed), spawn_key=(stream, index))


def get_rng(seed: int, stream: int, index: int = 0) -> np.random.Generator:
    """
    Get a Philox generator for a derived stream.

    Args:
        seed: Master seed
        stream: One of COMPONENT, DENSE, INITIAL, PATH
        index: Component or path index within the stream

    Returns:
        numpy Generator instance
    """
    return np.random.Generator(np.random.Philox(seed_sequence(seed, stream, index)))


def component_rng(seed: int, k: int) -> np.random.Generator:
    """Generator for mixture component k (0-based)."""
    return get_rng(seed, COMPONENT, k)


def path_seed(seed: int, index: int) -> int:
    """Derive the 64-bit seed of path ``index`` in a batch."""
    state = seed_sequence(seed, PATH, index).generate_state(1, dtype=np.uint64)
    return int(state[0])


def path_seeds(seed: int, n_paths: int) -> Tuple[int, ...]:
    """Derive the seeds of a whole batch in path order."""
    require(n_paths >= 1, f"n_paths={n_paths} must be at least 1")
    return tuple(path_seed(seed, i) for i in range(n_paths))
