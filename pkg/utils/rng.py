"""
Counter-based random streams.

Every stream is a Philox generator keyed by ``SeedSequence(seed, spawn_key)``,
so the numbers drawn for item ``i`` of a batch depend only on ``(seed, i)``
and never on how the batch was split across workers.
"""

import numpy as np

# Purpose tags keep independent uses of one seed apart.
PROPOSAL_STREAM = 0
OBSERVED_STREAM = 1
SIMULATION_STREAM = 2
SWEEP_STREAM = 3
ACCEPT_STREAM = 4
BINDING_STREAM = 5


def make_generator(seed: int, *stream: int) -> np.random.Generator:
    """
    Build the generator for one stream of a seeded computation.

    Args:
        seed: Non-negative integer run seed
        *stream: Integer path identifying the stream (purpose tag, index, ...)

    Returns:
        A numpy Generator backed by Philox

    Example:
        >>> rng = make_generator(7, PROPOSAL_STREAM, 12)
        >>> rng.standard_normal()  # identical on every call with (7, 0, 12)
    """
    if seed is None or int(seed) < 0:
        raise ValueError(f"Seed must be a non-negative integer, got {seed!r}")
    sequence = np.random.SeedSequence(int(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(sequence))
