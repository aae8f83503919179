"""Seeded pseudorandom bit interleaver (a fixed permutation per run)."""

import numpy as np

from ..errors import ContractError


class Interleaver:
    def __init__(self, perm):
        perm = np.asarray(perm, dtype=np.int64)
        n = perm.size
        if not np.array_equal(np.sort(perm), np.arange(n)):
            raise ContractError("interleaver permutation is not a bijection")
        self.perm = perm
        self.inv = np.empty(n, dtype=np.int64)
        self.inv[perm] = np.arange(n)

    @property
    def n(self):
        return self.perm.size


def make_interleaver(n, seed, identity=False):
    """Fisher-Yates permutation of [0, n) from a dedicated seeded stream."""
    if n < 1:
        raise ContractError("interleaver length must be >= 1")
    if identity:
        return Interleaver(np.arange(n))
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    return Interleaver(rng.permutation(n))


def interleave(frame, pi):
    frame = np.asarray(frame)
    if frame.shape[-1] != pi.n:
        raise ContractError(f"frame length {frame.shape[-1]} != {pi.n}")
    return frame[..., pi.perm]


def deinterleave(frame, pi):
    frame = np.asarray(frame)
    if frame.shape[-1] != pi.n:
        raise ContractError(f"frame length {frame.shape[-1]} != {pi.n}")
    return frame[..., pi.inv]
