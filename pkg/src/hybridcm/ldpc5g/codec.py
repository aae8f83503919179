"""Systematic encoding, rate matching, and puncturing for the lifted code.

Generated codewords are 1104 bits (22 systematic + 24 parity blocks of
Z_c = 24); the first two systematic blocks (48 bits) are punctured, so the
transmitted frame is 1056 bits and the code rate is exactly 528/1056 = 1/2.
"""

import numpy as np

from ..errors import ContractError
from .basegraph import (
    DEFAULT_ZC,
    SYSTEMATIC_COLS,
    USED_COLS,
    USED_ROWS,
    expand,
    load_base_graph,
)

PUNCTURED_BLOCKS = 2


class LdpcCode:
    """The rate-1/2 BG1 / Z_c=24 code: base graph, H, and encoder tables."""

    def __init__(self, bg=None, zc=DEFAULT_ZC):
        self.bg = bg if bg is not None else load_base_graph(zc=zc)
        self.zc = zc
        self.H = expand(self.bg, zc)
        self.k = SYSTEMATIC_COLS * zc          # 528
        self.n_generated = USED_COLS * zc      # 1104
        self.n_tx = self.n_generated - PUNCTURED_BLOCKS * zc  # 1056
        self._row_entries = self._used_rows_entries()
        self._check_core_structure()
        self._G = None

    def _used_rows_entries(self):
        rows = [[] for _ in range(USED_ROWS)]
        for (i, j), e in sorted(self.bg.entries.items()):
            if i < USED_ROWS and j < USED_COLS:
                rows[i].append((j, e))
        return rows

    def _check_core_structure(self):
        # back-substitution needs: XOR of the four core rows isolates the
        # first parity block, and each of rows 0..2 then introduces exactly
        # one new parity column
        first_parity = SYSTEMATIC_COLS
        shifts = []
        for i in range(4):
            for j, e in self._row_entries[i]:
                if j == first_parity:
                    shifts.append(e)
        survivors = [s for s in set(shifts) if shifts.count(s) % 2 == 1]
        if len(survivors) != 1:
            raise ContractError(
                "core rows do not isolate the first parity block "
                f"(column-{first_parity} shifts {shifts})")
        self._p0_shift = survivors[0]

    # -- encoding ----------------------------------------------------------

    def encode(self, msg):
        """Message (528 bits) -> systematic 1104-bit codeword.

        Core parity by back-substitution through the double-diagonal block,
        extension parity by direct accumulation of each remaining row.
        """
        msg = np.asarray(msg, dtype=np.uint8)
        if msg.shape != (self.k,):
            raise ContractError(f"message must be {self.k} bits, got {msg.shape}")
        if np.any(msg > 1):
            raise ContractError("message must be binary")
        zc = self.zc
        blocks = {j: msg[j * zc:(j + 1) * zc] for j in range(SYSTEMATIC_COLS)}

        def lifted(e, x):
            # P^e x: block-row r of the shifted identity selects x[(r+e) % Z]
            return np.roll(x, -e)

        lam = []
        for i in range(4):
            acc = np.zeros(zc, dtype=np.uint8)
            for j, e in self._row_entries[i]:
                if j < SYSTEMATIC_COLS:
                    acc ^= lifted(e, blocks[j])
            lam.append(acc)
        p0 = np.roll(lam[0] ^ lam[1] ^ lam[2] ^ lam[3], self._p0_shift)
        blocks[SYSTEMATIC_COLS] = p0

        for i in range(USED_ROWS):
            unknown = [(j, e) for j, e in self._row_entries[i] if j not in blocks]
            if not unknown:
                continue  # the core consistency row
            if len(unknown) != 1:
                raise ContractError(f"row {i} has {len(unknown)} unsolved blocks")
            (ju, eu) = unknown[0]
            acc = np.zeros(zc, dtype=np.uint8)
            for j, e in self._row_entries[i]:
                if j != ju:
                    acc ^= lifted(e, blocks[j])
            blocks[ju] = np.roll(acc, eu)  # P^{-e} acc
        if len(blocks) != USED_COLS:
            raise ContractError("encoding left unsolved parity blocks")
        return np.concatenate([blocks[j] for j in range(USED_COLS)])

    @property
    def generator(self):
        """Dense generator matrix (528 x 1104), built from the encoder."""
        if self._G is None:
            G = np.zeros((self.k, self.n_generated), dtype=np.uint8)
            e = np.zeros(self.k, dtype=np.uint8)
            for i in range(self.k):
                e[i] = 1
                G[i] = self.encode(e)
                e[i] = 0
            self._G = G
        return self._G

    def encode_batch(self, msgs):
        """Encode a (B, 528) batch via the generator matrix (BLAS matmul)."""
        msgs = np.asarray(msgs, dtype=np.uint8)
        if msgs.ndim != 2 or msgs.shape[1] != self.k:
            raise ContractError(f"batch must be (B, {self.k})")
        prod = msgs.astype(np.float64) @ self.generator.astype(np.float64)
        return (prod.astype(np.int64) & 1).astype(np.uint8)

    # -- rate matching -----------------------------------------------------

    def rate_match(self, codeword):
        """Drop the first 2 Z_c = 48 generated bits; order preserved."""
        codeword = np.asarray(codeword)
        if codeword.shape[-1] != self.n_generated:
            raise ContractError(
                f"codeword length {codeword.shape[-1]} != {self.n_generated}")
        return codeword[..., PUNCTURED_BLOCKS * self.zc:]

    def depuncture(self, llrs):
        """Prepend 48 zero LLRs (no channel information) to a 1056 frame."""
        llrs = np.asarray(llrs, dtype=np.float64)
        if llrs.shape[-1] != self.n_tx:
            raise ContractError(f"LLR frame length {llrs.shape[-1]} != {self.n_tx}")
        pad_shape = llrs.shape[:-1] + (PUNCTURED_BLOCKS * self.zc,)
        return np.concatenate([np.zeros(pad_shape), llrs], axis=-1)

    def syndrome(self, bits):
        return self.H.syndrome(bits)


def syndrome(bits, H):
    """H c^T over GF(2) for an explicit parity-check matrix."""
    return H.syndrome(bits)
