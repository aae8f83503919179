"""Reproducible counter-based random streams.

A stream is addressed by (master seed, shard index, purpose tag); distinct
addresses give statistically independent Philox substreams, and any shard
can be regenerated in isolation.
"""

import hashlib

import numpy as np


def _purpose_key(purpose):
    digest = hashlib.sha256(purpose.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def rng_streams(master_seed, shard, purpose):
    """Independent Generator for the (seed, shard, purpose) triple."""
    seq = np.random.SeedSequence(
        entropy=int(master_seed) & (2 ** 64 - 1),
        spawn_key=(int(shard), _purpose_key(purpose)),
    )
    return np.random.Generator(np.random.Philox(seq))
