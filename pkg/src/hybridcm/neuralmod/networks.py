"""Learned modulator / demodulator networks.

The modulator maps an m-bit pattern (presented as +-1) through a tanh layer,
ReLU hidden layers, and a final linear pair (real, imaginary); the full
2^m-point set is then centered and scaled to unit average power, and that
normalization is part of the differentiable graph. The demodulator takes
the M Gaussian log-likelihood features of a received sample through ReLU
layers into an m-unit sigmoid output. Hidden layers of both nets carry
batch normalization.
"""

import numpy as np

from .. import diffkit as dk
from ..errors import ContractError, DegenerateConstellationError


class Constellation:
    """2^m complex points indexed by label, plus the normalization stats."""

    def __init__(self, points, eta, sigma2):
        points = np.asarray(points, dtype=np.complex128)
        if points.ndim != 1 or points.size & (points.size - 1):
            raise ContractError("constellation size must be a power of two")
        self.points = points
        self.eta = complex(eta)
        self.sigma2 = float(sigma2)

    @property
    def M(self):
        return self.points.size

    @property
    def m(self):
        return int(np.log2(self.points.size))

    def validate(self, tol=1e-9):
        mean = self.points.mean()
        power = np.mean(np.abs(self.points) ** 2)
        if abs(mean) >= tol:
            raise ContractError(f"constellation mean {abs(mean):.3e} exceeds {tol}")
        if abs(power - 1.0) >= tol:
            raise ContractError(f"constellation power {power!r} not within {tol} of 1")


class Mlp:
    """Fully connected stack: affine, then batch norm and the layer's
    activation on every layer except the last (which has neither batch norm
    nor, optionally, an activation)."""

    def __init__(self, dims, acts, name, rng):
        if len(dims) < 2 or len(acts) != len(dims) - 1:
            raise ContractError("dims/acts mismatch")
        self.dims = list(dims)
        self.acts = list(acts)
        self.name = name
        self.weights = []
        self.biases = []
        self.bns = []
        n_layers = len(dims) - 1
        for li in range(n_layers):
            fan_in, fan_out = dims[li], dims[li + 1]
            # He-style bound for ReLU layers, Xavier-style otherwise
            if acts[li] == "relu":
                bound = np.sqrt(6.0 / fan_in)
            else:
                bound = np.sqrt(6.0 / (fan_in + fan_out))
            W = rng.uniform(-bound, bound, size=(fan_in, fan_out))
            self.weights.append(dk.Tensor(W))
            self.biases.append(dk.Tensor(np.zeros(fan_out)))
            self.bns.append(dk.BatchNormState(fan_out) if li < n_layers - 1 else None)

    @property
    def n_layers(self):
        return len(self.weights)

    def forward(self, x, mode):
        """x: Tensor (B, dims[0]) -> Tensor (B, dims[-1])."""
        h = x
        for li in range(self.n_layers):
            h = dk.affine(h, self.weights[li], self.biases[li])
            if self.bns[li] is not None:
                h = dk.batch_norm(h, self.bns[li], mode)
            if self.acts[li] is not None:
                h = dk.activation(self.acts[li], h)
        return h

    def infer(self, x):
        """Pure-numpy inference path; matches forward(mode='infer')."""
        h = np.asarray(x, dtype=np.float64)
        for li in range(self.n_layers):
            h = h @ self.weights[li].data + self.biases[li].data
            bn = self.bns[li]
            if bn is not None:
                inv = 1.0 / np.sqrt(bn.run_var + bn.eps)
                h = (h - bn.run_mean) * (bn.gamma.data * inv) + bn.beta.data
            act = self.acts[li]
            if act == "tanh":
                h = np.tanh(h)
            elif act == "relu":
                h = np.maximum(h, 0.0)
            elif act == "sigmoid":
                e = np.exp(-np.abs(h))
                h = np.where(h >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
        return h

    def parameters(self):
        out = []
        for li in range(self.n_layers):
            out.append((f"{self.name}_l{li}/W", self.weights[li]))
            out.append((f"{self.name}_l{li}/b", self.biases[li]))
            bn = self.bns[li]
            if bn is not None:
                out.append((f"{self.name}_l{li}/bn_gamma", bn.gamma))
                out.append((f"{self.name}_l{li}/bn_beta", bn.beta))
        return out


class EncoderNet(Mlp):
    """m +-1 inputs -> tanh layer -> ReLU hiddens -> 2 linear outputs."""

    def __init__(self, m, hidden, rng):
        if not hidden:
            raise ContractError("encoder needs at least one hidden layer")
        acts = ["tanh"] + ["relu"] * (len(hidden) - 1) + [None]
        super().__init__([m, *hidden, 2], acts, name="enc", rng=rng)
        self.m = m
        self.hidden = list(hidden)


class DecoderNet(Mlp):
    """M log-likelihood features -> ReLU hiddens -> m sigmoid outputs."""

    def __init__(self, M, m, hidden, rng):
        if not hidden:
            raise ContractError("decoder needs at least one hidden layer")
        acts = ["relu"] * len(hidden) + ["sigmoid"]
        super().__init__([M, *hidden, m], acts, name="dec", rng=rng)
        self.M = M
        self.m = m
        self.hidden = list(hidden)


def labels_pm1(m):
    """All 2^m bit patterns, MSB first, mapped 0 -> -1 and 1 -> +1."""
    labels = np.arange(2 ** m)
    shifts = np.arange(m - 1, -1, -1)
    bits = (labels[:, None] >> shifts) & 1
    return 2.0 * bits - 1.0


def power_normalize(points):
    """Center a (K, 2) point set and scale to unit average power.

    Returns (normalized Tensor, eta Tensor (1, 2), sigma2 scalar Tensor);
    gradients flow through the sample mean and variance.
    """
    k = points.data.shape[0]
    if k < 2:
        raise ContractError("need at least 2 points to normalize")
    eta = dk.tmean(points, axis=0, keepdims=True)            # (1, 2)
    centered = dk.sub(points, eta)
    sigma2 = dk.tmean(dk.tsum(dk.square(centered), axis=1))  # mean |x - eta|^2
    if float(sigma2.data) <= 0.0:
        raise DegenerateConstellationError(
            "all encoder outputs coincide; constellation has zero variance")
    normalized = dk.div(centered, dk.sqrt(sigma2))
    return normalized, eta, sigma2


def enumerate_constellation(enc, mode="infer"):
    """Run the encoder over all 2^m labels and normalize.

    Returns (points Tensor (2^m, 2), eta, sigma2). In training this is
    rebuilt inside every update's graph so the normalization statistics
    track the parameters.
    """
    x = dk.Tensor(labels_pm1(enc.m))
    pre = enc.forward(x, mode)
    if not np.all(np.isfinite(pre.data)):
        bad = int(np.flatnonzero(~np.isfinite(pre.data).all(axis=1))[0])
        raise ContractError(f"encoder produced non-finite output for label {bad}")
    return power_normalize(pre)


def frozen_constellation(enc):
    """Inference-mode Constellation snapshot of the encoder."""
    points, eta, sigma2 = enumerate_constellation(enc, mode="infer")
    cpx = points.data[:, 0] + 1j * points.data[:, 1]
    return Constellation(cpx, eta.data[0, 0] + 1j * eta.data[0, 1],
                         float(sigma2.data))


def nn_modulate(bits, const):
    """m-bit groups -> frozen constellation points (label indexing)."""
    bits = np.asarray(bits)
    if bits.shape[-1] != const.m:
        raise ContractError(f"expected {const.m} bits per symbol")
    weights = 1 << np.arange(const.m - 1, -1, -1)
    return const.points[bits @ weights]


def feature_map(y, sigma2, points):
    """Gaussian log-density of y against every constellation point.

    Tensor version used inside the training graph: ``y`` (N, 2) and
    ``points`` (K, 2) give (N, K) features -ln(pi s2) - |y - x|^2 / s2,
    differentiable in both arguments. Distances expand through matmul so
    no (N, K, 2) intermediate is materialized.
    """
    if sigma2 <= 0.0:
        raise ContractError("feature map needs positive noise variance")
    y2 = dk.tsum(dk.square(y), axis=1, keepdims=True)        # (N, 1)
    p2 = dk.tsum(dk.square(points), axis=1, keepdims=True)   # (K, 1)
    cross = dk.matmul(y, dk.transpose(points))               # (N, K)
    dist2 = dk.add(dk.sub(y2, dk.mul(cross, dk.Tensor(2.0))), dk.transpose(p2))
    return dk.sub(dk.mul(dist2, dk.Tensor(-1.0 / sigma2)),
                  dk.Tensor(np.log(np.pi * sigma2)))


def feature_map_np(y, sigma2, points):
    """Numpy twin of feature_map for inference; y and points complex."""
    if sigma2 <= 0.0:
        raise ContractError("feature map needs positive noise variance")
    y = np.asarray(y, dtype=np.complex128)
    d2 = np.abs(y[..., None] - points) ** 2
    return -np.log(np.pi * sigma2) - d2 / sigma2


def nn_demodulate(y, sigma2, const, dec):
    """Received samples -> per-bit probability estimates, in (0, 1)."""
    if dec.M != const.M:
        raise ContractError(
            f"decoder input width {dec.M} != constellation size {const.M}")
    psi = feature_map_np(y, sigma2, const.points)
    return dec.infer(psi)
