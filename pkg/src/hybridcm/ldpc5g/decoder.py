"""Flooding-schedule sum-product decoding.

Check updates use the exact tanh product rule; internal LLR magnitudes are
clipped at +-30 so the products never saturate. The batch axis exists purely
for throughput: every frame is decoded independently and deterministically,
and converged frames are frozen (their first zero-syndrome hard decision is
what gets returned) and dropped from the working set.

Sign convention: llr > 0 favors bit 0.
"""

import numpy as np

from ..errors import ContractError

LLR_CLIP = 30.0
_TINY = 1e-300            # stands in for tanh(0); carries no belief
_RATIO_MAX = 1.0 - 2.0 ** -50


def spa_decode(llrs, H, max_iter=50, early_exit=True, clip_llr=LLR_CLIP):
    """Decode one frame or a (B, n) batch against parity-check matrix H.

    Returns (bits, converged, iterations); each frame's hard decision is the
    one taken at its first zero-syndrome iteration (or at max_iter). With
    early_exit=False all frames run the full max_iter iterations and the
    final hard decision is returned.
    """
    llrs = np.asarray(llrs, dtype=np.float64)
    single = llrs.ndim == 1
    if single:
        llrs = llrs[None, :]
    if llrs.ndim != 2 or llrs.shape[1] != H.n_cols:
        raise ContractError(f"LLR frame length {llrs.shape[-1]} != {H.n_cols}")
    if not np.all(np.isfinite(llrs)):
        raise ContractError("non-finite channel LLRs")
    if np.any(np.diff(H.row_ptr) == 0) or np.any(np.diff(H.col_ptr) == 0):
        raise ContractError("decoder requires every check and bit to have degree >= 1")

    B = llrs.shape[0]
    out_bits = np.zeros((B, H.n_cols), dtype=np.uint8)
    out_conv = np.zeros(B, dtype=bool)
    out_iter = np.full(B, max_iter, dtype=np.int64)

    active = np.arange(B)
    ch = np.clip(llrs, -clip_llr, clip_llr)
    v2c = ch[:, H.edge_col]  # row-sorted edge order

    for it in range(1, max_iter + 1):
        # check nodes: extrinsic tanh products per row
        t = np.tanh(0.5 * v2c)
        t[t == 0.0] = _TINY
        prod = np.multiply.reduceat(t, H.row_ptr[:-1], axis=1)
        ratio = np.clip(prod[:, H.edge_row] / t, -_RATIO_MAX, _RATIO_MAX)
        c2v = np.clip(2.0 * np.arctanh(ratio), -clip_llr, clip_llr)
        # variable nodes: channel plus all incoming, minus own edge
        totals = ch + np.add.reduceat(c2v[:, H.col_perm], H.col_ptr[:-1], axis=1)
        v2c = np.clip(totals[:, H.edge_col] - c2v, -clip_llr, clip_llr)

        hard = (totals < 0.0).astype(np.uint8)
        ok = ~H.syndrome(hard).any(axis=1)

        if not early_exit:
            out_bits[active] = hard
            out_conv[active] = ok
            continue
        if ok.any():
            # freeze newly converged frames and drop them from the batch
            idx = active[ok]
            out_bits[idx] = hard[ok]
            out_conv[idx] = True
            out_iter[idx] = it
            keep = ~ok
            active, ch, v2c, hard = active[keep], ch[keep], v2c[keep], hard[keep]
            if active.size == 0:
                break
        if it == max_iter:
            out_bits[active] = hard

    if single:
        return out_bits[0], bool(out_conv[0]), int(out_iter[0])
    return out_bits, out_conv, out_iter
