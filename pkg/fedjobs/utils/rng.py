"""
Named random substreams.

One root seed; every consumer derives its own independent generator from
(seed, stream, *indices) through ``numpy.random.SeedSequence``. Two runs that
share a seed therefore draw identical oracle noise for round t / job k no
matter which scheduler produced the assignments.
"""

from enum import IntEnum

from numpy.random import SFC64, Generator, SeedSequence


class Stream(IntEnum):
    """Substream identifiers; values are part of the determinism contract."""

    POPULATION = 1
    PAYMENTS = 2
    SCHEDULE = 3
    ORACLE = 4


def substream(seed: int, stream: Stream, *indices: int) -> Generator:
    """
    Build the generator for one named substream.

    Args:
        seed: Root experiment seed (0 <= seed < 2**64)
        stream: Which consumer the generator belongs to
        *indices: Further coordinates, e.g. (round,) or (round, job_id)

    Returns:
        An SFC64-backed Generator, independent of every other coordinate
    """
    entropy = [int(seed), int(stream), *(int(i) for i in indices)]
    return Generator(SFC64(SeedSequence(entropy)))
