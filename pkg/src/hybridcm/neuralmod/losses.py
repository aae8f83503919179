"""Training objectives: the mutual-information-style rate estimate and the
binary cross entropy alternative, plus the probability-to-LLR bridge.

The rate objective, in bits per symbol, for N samples of m-bit patterns is

    L = m + (1/N) sum_j [ sum_i log2 q(c_ij, p_ij) - log2 sum_k exp(psi_jk) ]

where q(c, p) = p if c = 1 else 1 - p and psi_jk is the Gaussian log-density
of sample j against constellation point k. Training maximizes L (the loop
minimizes -L). Probabilities are clamped to [eps, 1 - eps] inside logs.
"""

import numpy as np

from .. import diffkit as dk
from ..errors import ContractError

PROB_EPS = 1e-12
LN2 = float(np.log(2.0))


def metric_q(c, p):
    """Per-bit decision metric: p where the bit is 1, 1 - p where it is 0."""
    c = np.asarray(c)
    if isinstance(p, dk.Tensor):
        cb = dk.Tensor(c.astype(np.float64))
        return dk.add(dk.mul(cb, p), dk.mul(dk.sub(dk.Tensor(1.0), cb),
                                            dk.sub(dk.Tensor(1.0), p)))
    p = np.asarray(p, dtype=np.float64)
    return np.where(c == 1, p, 1.0 - p)


def gmi_objective(bits, p, psi):
    """Rate estimate (bits/symbol) from bit probabilities and features.

    Tensor-graph core shared by the training loss; ``bits`` is a constant
    (N, m) 0/1 array, ``p`` the (N, m) probability Tensor, ``psi`` the
    (N, K) log-density Tensor.
    """
    n, m = np.asarray(bits).shape
    if n == 0:
        raise ContractError("empty batch")
    q = metric_q(bits, p)
    q = dk.clip(q, PROB_EPS, 1.0 - PROB_EPS)
    log2_q = dk.mul(dk.log(q), dk.Tensor(1.0 / LN2))
    num = dk.tsum(log2_q, axis=1)                       # (N,)
    den = dk.mul(dk.log_sum_exp(psi, axis=1), dk.Tensor(1.0 / LN2))
    per_sample = dk.sub(num, den)
    out = dk.add(dk.Tensor(float(m)), dk.tmean(per_sample))
    if not np.isfinite(out.data):
        bad = int(np.flatnonzero(~np.isfinite(per_sample.data))[0])
        raise ContractError(f"non-finite rate summand at sample {bad}")
    return out


def gmi_loss(bits, y, sigma2, points, dec, mode="train"):
    """Negative rate estimate for a same-graph (y, points) pair.

    ``y`` (N, 2) must have been built as modulated-symbol-plus-noise inside
    the active tape so encoder gradients flow through both the transmitted
    symbols and the feature map; ``points`` is the (K, 2) normalized
    constellation Tensor from the same graph.
    """
    from .networks import feature_map
    psi = feature_map(y, sigma2, points)
    p = dec.forward(psi, mode)
    return dk.mul(gmi_objective(bits, p, psi), dk.Tensor(-1.0))


def bce_loss(bits, p):
    """Binary cross entropy in bits per bit, clamped like the rate loss."""
    bits = np.asarray(bits)
    n = bits.size
    if n == 0:
        raise ContractError("empty batch")
    q = metric_q(bits, p)  # q(c, p) is the probability assigned to the label
    q = dk.clip(q, PROB_EPS, 1.0 - PROB_EPS)
    out = dk.mul(dk.tmean(dk.log(q)), dk.Tensor(-1.0 / LN2))
    if not np.isfinite(out.data):
        raise ContractError("non-finite cross entropy")
    return out


def llr_from_prob(p):
    """ln((1-p)/p) with p clamped to [eps, 1-eps]; positive favors bit 0."""
    p = np.clip(np.asarray(p, dtype=np.float64), PROB_EPS, 1.0 - PROB_EPS)
    return np.log1p(-p) - np.log(p)


def gmi_samples_np(bits, p, psi):
    """Numpy Eq-for-eq twin of gmi_objective: per-sample rate summands.

    Used by the Monte Carlo estimator; returns an (N,) array whose mean is
    the rate estimate in bits/symbol.
    """
    bits = np.asarray(bits)
    m = bits.shape[1]
    q = np.clip(metric_q(bits, np.asarray(p)), PROB_EPS, 1.0 - PROB_EPS)
    num = np.sum(np.log2(q), axis=1)
    mx = psi.max(axis=1, keepdims=True)
    den = (mx[:, 0] + np.log(np.sum(np.exp(psi - mx), axis=1))) / LN2
    return m + num - den
