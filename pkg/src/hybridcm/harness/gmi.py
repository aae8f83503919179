"""Monte Carlo rate estimation from per-bit decision metrics.

The reported figure is the self-normalized bit-metric rate

    m + (1/N) sum_j sum_i log2 q(c_ij, y_j)      [bits/symbol]

i.e. the rate functional with the metric normalized per bit, which equals
H(X) minus the summed per-bit cross entropies. For the QAM baseline the
bit metric is the exact posterior P(c_i | y); for the learned system it is
the decoder net's probability output. With the true posteriors this is the
classic per-bit-decoding rate of the constellation, it tends to 0 as the
noise grows, and it is directly comparable across systems.
"""

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ContractError
from ..modem import awgn, make_gray_qam
from ..neuralmod import PROB_EPS, feature_map_np, load_checkpoint, metric_q, nn_demodulate
from ..rngstreams import rng_streams


@dataclass
class GmiEstimate:
    bits_per_symbol: float
    std_error: float
    n_symbols: int


def qam_bit_posteriors(y, const, sigma2):
    """Exact P(c_i = 1 | y) for every bit of a Gray-QAM constellation."""
    psi = feature_map_np(y, sigma2, const.points)
    w = np.exp(psi - psi.max(axis=-1, keepdims=True))
    total = w.sum(axis=-1)
    post = np.empty(np.shape(y) + (const.m,))
    for i in range(const.m):
        post[..., i] = w[..., const.bit1_idx[i]].sum(axis=-1) / total
    return post


def estimate_gmi(system, snr_db, n_symbols, seed, M=None, checkpoint=None):
    """Estimate the per-bit-metric achievable rate of a system at one SNR.

    system is "qam" (requires M) or "dnn" (requires checkpoint). Returns a
    GmiEstimate with the sample mean and its standard error.
    """
    if n_symbols < 2:
        raise ContractError("need at least 2 symbols")
    sigma2 = 10.0 ** (-snr_db / 10.0)
    label_rng = rng_streams(seed, 0, "gmi-labels")
    noise_rng = rng_streams(seed, 0, "gmi-noise")

    if system == "qam":
        if M is None:
            raise ContractError("qam estimation requires M")
        const = make_gray_qam(M)
        m = const.m
        labels = label_rng.integers(0, M, size=n_symbols)
        y = awgn(const.points[labels], sigma2, noise_rng)
        p = qam_bit_posteriors(y, const, sigma2)
        bits = const.bits_of_labels(labels)
    elif system == "dnn":
        if checkpoint is None:
            raise ContractError("dnn estimation requires a checkpoint")
        ckpt = load_checkpoint(checkpoint) if isinstance(checkpoint, str) else checkpoint
        const = ckpt.constellation
        m = const.m
        labels = label_rng.integers(0, const.M, size=n_symbols)
        y = awgn(const.points[labels], sigma2, noise_rng)
        p = nn_demodulate(y, sigma2, const, ckpt.dec)
        bits = ((labels[:, None] >> np.arange(m - 1, -1, -1)) & 1).astype(np.uint8)
    else:
        raise ContractError(f"unknown system {system!r}")

    q = np.clip(metric_q(bits, p), PROB_EPS, 1.0)
    summand = m + np.sum(np.log2(q), axis=1)
    mean = float(np.mean(summand))
    se = float(np.std(summand, ddof=1) / math.sqrt(n_symbols))
    return GmiEstimate(bits_per_symbol=mean, std_error=se, n_symbols=n_symbols)
