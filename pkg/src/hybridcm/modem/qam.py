"""Square Gray-QAM constellations with exact log-domain bit demapping.

Label convention: m bits per symbol, I-axis bits first then Q-axis bits,
MSB first within each axis. Each axis is a Gray-coded PAM; the full
constellation is normalized to unit average power.
"""

import numpy as np

from ..errors import ContractError

SUPPORTED_ORDERS = (4, 16, 64)


def _gray_codes(nbits):
    i = np.arange(1 << nbits)
    return i ^ (i >> 1)


def _gray_pam(nbits):
    """Levels indexed by the Gray label value: label g -> level.

    Oriented so the all-zero label sits at the most positive level, which
    makes the QPSK in-phase LLR reduce to +2*sqrt(2)*Re(y)/sigma2.
    """
    levels = np.arange(2 ** nbits - 1, -(2 ** nbits), -2, dtype=np.float64)
    out = np.empty(2 ** nbits)
    out[_gray_codes(nbits)] = levels  # adjacent levels differ in one bit
    return out


class QamConstellation:
    """M unit-power points indexed by the m-bit label."""

    def __init__(self, M):
        if M not in SUPPORTED_ORDERS:
            raise ContractError(f"unsupported QAM order {M}; choose from {SUPPORTED_ORDERS}")
        self.M = M
        self.m = int(np.log2(M))
        half = self.m // 2
        pam = _gray_pam(half)
        labels = np.arange(M)
        i_val = pam[labels >> half]
        q_val = pam[labels & ((1 << half) - 1)]
        points = i_val + 1j * q_val
        self.points = points / np.sqrt(np.mean(np.abs(points) ** 2))
        # per-bit index sets for the demapper: label bit i == 0 / == 1
        self.bit0_idx = []
        self.bit1_idx = []
        for i in range(self.m):
            mask = 1 << (self.m - 1 - i)
            self.bit0_idx.append(np.flatnonzero((labels & mask) == 0))
            self.bit1_idx.append(np.flatnonzero((labels & mask) != 0))

    def labels_of_bits(self, bits):
        """(..., m) bit groups -> integer labels, MSB first."""
        bits = np.asarray(bits)
        weights = 1 << np.arange(self.m - 1, -1, -1)
        return bits @ weights

    def bits_of_labels(self, labels):
        labels = np.asarray(labels)
        shifts = np.arange(self.m - 1, -1, -1)
        return ((labels[..., None] >> shifts) & 1).astype(np.uint8)


def make_gray_qam(M):
    return QamConstellation(M)


def qam_modulate(bits, const):
    """Map m-bit groups to constellation points.

    Accepts one group of m bits or an (N, m) batch.
    """
    bits = np.asarray(bits)
    if bits.shape[-1] != const.m:
        raise ContractError(f"expected {const.m} bits per symbol, got {bits.shape[-1]}")
    return const.points[const.labels_of_bits(bits)]


def qam_bit_llrs(y, const, sigma2, max_log=False):
    """Exact per-bit LLRs ln(sum_{bit=0} e^{-|y-x|^2/s2} / sum_{bit=1} ...).

    ``y`` is one complex sample or an array; returns (..., m) LLRs with the
    convention llr > 0 favors bit 0. Computed with max-shifted log-sum-exp;
    max_log=True replaces each sum by its dominant term (ablation only).
    """
    if sigma2 <= 0.0:
        raise ContractError("noise variance must be positive for demapping")
    y = np.atleast_1d(np.asarray(y, dtype=np.complex128))
    metric = -(np.abs(y[..., None] - const.points) ** 2) / sigma2
    reduce = (lambda v: np.max(v, axis=-1)) if max_log else _logsumexp
    llrs = np.empty(y.shape + (const.m,))
    for i in range(const.m):
        llrs[..., i] = (reduce(metric[..., const.bit0_idx[i]])
                        - reduce(metric[..., const.bit1_idx[i]]))
    return llrs


def _logsumexp(x):
    m = np.max(x, axis=-1, keepdims=True)
    return np.squeeze(m, -1) + np.log(np.sum(np.exp(x - m), axis=-1))


def qam_hard_decide(y, const):
    """Nearest-point labels for an array of received samples."""
    y = np.asarray(y, dtype=np.complex128)
    return np.argmin(np.abs(y[..., None] - const.points) ** 2, axis=-1)
