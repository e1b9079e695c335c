"""
Seeded, splittable random streams.

Every stochastic operation draws from a numpy Generator built on the
counter-based Philox bit generator. The 128-bit Philox key is
(seed << 64) | stream_id, where stream_id is the first 8 bytes (big endian) of
SHA-256 of the stream name. The counter argument selects block `counter` of
the 256-bit Philox counter space (counter << 128), so chunk i of a Monte
Carlo run, or restart i of a search, reads a stream disjoint from every other
block regardless of which worker consumes it.

This construction is part of the reproducibility contract: changing it
changes every seeded output.
"""

import hashlib
import logging
from typing import Union

import numpy as np

logger = logging.getLogger(__name__)

MAX_SEED = 2 ** 63
COUNTER_SHIFT = 128


def validate_seed(seed: int) -> int:
    """Return seed as int, raising ValueError outside [0, 2^63)."""
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise ValueError(f"seed must be an integer, got {type(seed).__name__}")
    seed = int(seed)
    if not 0 <= seed < MAX_SEED:
        raise ValueError(f"seed must lie in [0, 2^63), got {seed}")
    return seed


def stream_id(stream: str) -> int:
    digest = hashlib.sha256(stream.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def make_generator(seed: int, stream: str, counter: int = 0) -> np.random.Generator:
    """
    Build the generator for (seed, stream, counter).

    Args:
        seed: Integer seed in [0, 2^63)
        stream: Name of the consumer, e.g. "volume_mc" or "distance.restart"
        counter: Block index (chunk or restart number), >= 0

    Returns:
        numpy Generator over Philox
    """
    seed = validate_seed(seed)
    if counter < 0:
        raise ValueError(f"counter must be nonnegative, got {counter}")
    key = (seed << 64) | stream_id(stream)
    bit_generator = np.random.Philox(key=key, counter=int(counter) << COUNTER_SHIFT)
    return np.random.Generator(bit_generator)


def derive_seed(seed: int, *labels: Union[str, int]) -> int:
    """
    Child seed for a labelled sub-task, in [0, 2^63).

    Same SHA-256 construction as the stream ids; labels are joined with '/'.
    """
    seed = validate_seed(seed)
    material = "/".join([str(seed)] + [str(label) for label in labels])
    digest = hashlib.sha256(material.encode("utf-8")).digest()
    child = int.from_bytes(digest[:8], "big") >> 1
    logger.debug(f"Derived seed {child} from {seed} with labels {labels}")
    return child
