"""
Counter-based random substreams.

Every stream is a Philox generator keyed by a SeedSequence spawned from
the experiment seed, so a stream depends only on (seed, purpose, index)
and never on which worker consumes it or in what order.
"""

from typing import Iterator, Tuple

import numpy as np

# Spawn-key namespaces
TRIAL_BLOCKS = 0
SINGLE_TRIALS = 1
PHASE_NOISE = 2


def _generator(seed: int, *spawn_key: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=spawn_key)))


def block_stream(seed: int, block_index: int) -> np.random.Generator:
    """Stream for one fixed-size block of Monte Carlo trials."""
    return _generator(seed, TRIAL_BLOCKS, block_index)


def trial_stream(seed: int, trial_index: int) -> np.random.Generator:
    """Stream for a single trial, used by the one-realization API."""
    return _generator(seed, SINGLE_TRIALS, trial_index)


def realization_stream(seed: int, realization_index: int) -> np.random.Generator:
    """Stream for one phase-noise oracle realization."""
    return _generator(seed, PHASE_NOISE, realization_index)


def partition(n_trials: int, block_size: int) -> Iterator[Tuple[int, int]]:
    """
    Split trials into (block_index, block_length) pieces.

    The split depends only on n_trials and block_size.
    """
    if block_size < 1:
        raise ValueError(f"block_size must be >= 1, got {block_size}")
    n_blocks = -(-n_trials // block_size)
    for b in range(n_blocks):
        yield b, min(block_size, n_trials - b * block_size)
