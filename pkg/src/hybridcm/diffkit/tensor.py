"""Tape-based reverse-mode automatic differentiation over dense float64 arrays.

The op set is exactly what a small modulator/demodulator MLP plus its
information-theoretic losses need: affine maps, the three activations,
batch normalization, stable log-sum-exp, elementwise arithmetic with
numpy broadcasting, reductions, and row gathering.

Usage:

    with Tape() as tape:
        h = affine(x, W, b)
        loss = mean(square(h))
    backward(tape, loss)      # fills .grad on every tensor in the graph
"""

import numpy as np

from ..errors import ContractError

_ACTIVE_TAPES = []


class Tensor:
    """Dense real array plus an optional gradient buffer of the same shape."""

    __slots__ = ("data", "grad")

    def __init__(self, data):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad = None

    @property
    def shape(self):
        return self.data.shape

    @property
    def size(self):
        return self.data.size

    def __repr__(self):
        return f"Tensor(shape={self.data.shape})"

    # sugar so loss code stays readable; every dunder routes through the
    # module-level primitives and therefore records on the active tape
    def __add__(self, other):
        return add(self, _as_tensor(other))

    def __radd__(self, other):
        return add(_as_tensor(other), self)

    def __sub__(self, other):
        return sub(self, _as_tensor(other))

    def __rsub__(self, other):
        return sub(_as_tensor(other), self)

    def __mul__(self, other):
        return mul(self, _as_tensor(other))

    def __rmul__(self, other):
        return mul(_as_tensor(other), self)

    def __truediv__(self, other):
        return div(self, _as_tensor(other))

    def __rtruediv__(self, other):
        return div(_as_tensor(other), self)

    def __neg__(self):
        return mul(self, Tensor(-1.0))

    def __matmul__(self, other):
        return matmul(self, other)


def _as_tensor(x):
    return x if isinstance(x, Tensor) else Tensor(x)


class Tape:
    """Ordered record of primitive ops; execution order is topological.

    A record is ``(out, inputs, vjps)`` where ``vjps[i]`` maps the gradient
    at ``out`` to the gradient contribution for ``inputs[i]``.
    """

    __slots__ = ("records",)

    def __init__(self):
        self.records = []

    def __len__(self):
        return len(self.records)

    def __enter__(self):
        _ACTIVE_TAPES.append(self)
        return self

    def __exit__(self, exc_type, exc, tb):
        popped = _ACTIVE_TAPES.pop()
        assert popped is self
        return False


def _record(out, inputs, vjps):
    if _ACTIVE_TAPES:
        _ACTIVE_TAPES[-1].records.append((out, inputs, vjps))


def backward(tape, loss):
    """Reverse sweep over the tape, accumulating gradients additively.

    Every tensor reachable from the tape gets a fresh ``.grad``; gradients
    from multiple consumers add. Deterministic: a second sweep over the
    same tape produces bit-identical buffers.
    """
    if not isinstance(loss, Tensor) or loss.size != 1:
        raise ContractError("backward requires a scalar loss tensor")
    if not tape.records:
        raise ContractError("backward on an empty tape")
    for out, inputs, _ in tape.records:
        out.grad = None
        for t in inputs:
            t.grad = None
    loss.grad = np.ones_like(loss.data)
    for out, inputs, vjps in reversed(tape.records):
        g = out.grad
        if g is None:
            continue
        for t, vjp in zip(inputs, vjps):
            contrib = vjp(g)
            if t.grad is None:
                t.grad = contrib.astype(np.float64, copy=True)
            else:
                t.grad = t.grad + contrib


def _unbroadcast(grad, shape):
    """Sum a broadcasted gradient back down to ``shape``."""
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, d in enumerate(shape) if d == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


# ---------------------------------------------------------------------------
# elementwise arithmetic (full numpy broadcasting)

def add(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    out = Tensor(a.data + b.data)
    _record(out, (a, b), (
        lambda g: _unbroadcast(g, a.data.shape),
        lambda g: _unbroadcast(g, b.data.shape),
    ))
    return out


def sub(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    out = Tensor(a.data - b.data)
    _record(out, (a, b), (
        lambda g: _unbroadcast(g, a.data.shape),
        lambda g: _unbroadcast(-g, b.data.shape),
    ))
    return out


def mul(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    out = Tensor(a.data * b.data)
    _record(out, (a, b), (
        lambda g: _unbroadcast(g * b.data, a.data.shape),
        lambda g: _unbroadcast(g * a.data, b.data.shape),
    ))
    return out


def div(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    out = Tensor(a.data / b.data)
    _record(out, (a, b), (
        lambda g: _unbroadcast(g / b.data, a.data.shape),
        lambda g: _unbroadcast(-g * a.data / (b.data * b.data), b.data.shape),
    ))
    return out


def square(x):
    return mul(x, x)


def sqrt(x):
    out = Tensor(np.sqrt(x.data))
    _record(out, (x,), (lambda g: g * 0.5 / out.data,))
    return out


def exp(x):
    out = Tensor(np.exp(x.data))
    _record(out, (x,), (lambda g: g * out.data,))
    return out


def log(x):
    out = Tensor(np.log(x.data))
    _record(out, (x,), (lambda g: g / x.data,))
    return out


def clip(x, lo, hi):
    """Clamp values; gradient passes through only where unclamped."""
    out = Tensor(np.clip(x.data, lo, hi))
    inside = ((x.data >= lo) & (x.data <= hi)).astype(np.float64)
    _record(out, (x,), (lambda g: g * inside,))
    return out


# ---------------------------------------------------------------------------
# linear algebra

def transpose(x):
    out = Tensor(x.data.T)
    _record(out, (x,), (lambda g: g.T,))
    return out


def matmul(a, b):
    if a.data.ndim != 2 or b.data.ndim != 2:
        raise ContractError("matmul expects 2-D tensors")
    if a.data.shape[1] != b.data.shape[0]:
        raise ContractError(
            f"matmul inner dimensions differ: {a.data.shape} @ {b.data.shape}")
    out = Tensor(a.data @ b.data)
    _record(out, (a, b), (
        lambda g: g @ b.data.T,
        lambda g: a.data.T @ g,
    ))
    return out


def affine(x, W, b):
    """x @ W + b with exact gradients for all three inputs."""
    if x.data.ndim != 2 or W.data.ndim != 2:
        raise ContractError("affine expects 2-D input and weight")
    if x.data.shape[1] != W.data.shape[0]:
        raise ContractError(
            f"affine: input width {x.data.shape[1]} does not match "
            f"weight rows {W.data.shape[0]}")
    if b.data.shape != (W.data.shape[1],):
        raise ContractError(
            f"affine: bias shape {b.data.shape} does not match "
            f"weight columns {W.data.shape[1]}")
    out = Tensor(x.data @ W.data + b.data)
    _record(out, (x, W, b), (
        lambda g: g @ W.data.T,
        lambda g: x.data.T @ g,
        lambda g: g.sum(axis=0),
    ))
    return out


def gather_rows(x, index):
    """Select rows of ``x`` by integer index; backward scatter-adds."""
    index = np.asarray(index)
    out = Tensor(x.data[index])

    def vjp(g):
        acc = np.zeros_like(x.data)
        np.add.at(acc, index, g)
        return acc

    _record(out, (x,), (vjp,))
    return out


# ---------------------------------------------------------------------------
# reductions

def tsum(x, axis=None, keepdims=False):
    out = Tensor(np.sum(x.data, axis=axis, keepdims=keepdims))

    def vjp(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return np.broadcast_to(g, x.data.shape).copy()

    _record(out, (x,), (vjp,))
    return out


def tmean(x, axis=None, keepdims=False):
    n = x.data.size if axis is None else x.data.shape[axis]
    out = Tensor(np.mean(x.data, axis=axis, keepdims=keepdims))

    def vjp(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return np.broadcast_to(g, x.data.shape) / n

    _record(out, (x,), (vjp,))
    return out


def log_sum_exp(x, axis):
    """Max-shifted log of summed exponentials along ``axis``.

    -inf entries are legal (their exp contributes 0); the backward pass is
    the softmax of the inputs.
    """
    if x.data.shape[axis] < 1:
        raise ContractError("log_sum_exp needs at least one element on axis")
    m = np.max(x.data, axis=axis, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)  # all -inf slice: lse = log 0 = -inf
    e = np.exp(x.data - m)
    s = np.sum(e, axis=axis, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        out_data = np.squeeze(m + np.log(s), axis=axis)
        soft = np.where(s > 0.0, e / s, 0.0)
    out = Tensor(out_data)

    def vjp(g):
        return np.expand_dims(g, axis) * soft

    _record(out, (x,), (vjp,))
    return out


# ---------------------------------------------------------------------------
# activations

_ACTIVATIONS = ("tanh", "relu", "sigmoid")


def activation(kind, x):
    """Elementwise tanh / relu / sigmoid with the analytic derivative."""
    if kind == "tanh":
        y = np.tanh(x.data)
        deriv = 1.0 - y * y
    elif kind == "relu":
        y = np.maximum(x.data, 0.0)
        deriv = (x.data > 0.0).astype(np.float64)
    elif kind == "sigmoid":
        y = _sigmoid(x.data)
        deriv = y * (1.0 - y)
    else:
        raise ContractError(f"unknown activation {kind!r}; expected one of {_ACTIVATIONS}")
    if not np.all(np.isfinite(x.data)):
        raise ContractError(f"non-finite input to {kind}")
    out = Tensor(y)
    _record(out, (x,), (lambda g: g * deriv,))
    return out


def _sigmoid(v):
    out = np.empty_like(v)
    pos = v >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-v[pos]))
    ev = np.exp(v[~pos])
    out[~pos] = ev / (1.0 + ev)
    return out


def tanh(x):
    return activation("tanh", x)


def relu(x):
    return activation("relu", x)


def sigmoid(x):
    return activation("sigmoid", x)


# ---------------------------------------------------------------------------
# batch normalization

class BatchNormState:
    """Learnable scale/shift plus running statistics for inference."""

    def __init__(self, width, momentum=0.1, eps=1e-5):
        if not 0.0 < momentum < 1.0:
            raise ContractError("batch-norm momentum must lie in (0, 1)")
        if eps <= 0.0:
            raise ContractError("batch-norm eps must be positive")
        self.gamma = Tensor(np.ones(width))
        self.beta = Tensor(np.zeros(width))
        self.run_mean = np.zeros(width)
        self.run_var = np.ones(width)
        self.momentum = momentum
        self.eps = eps

    @property
    def width(self):
        return self.gamma.data.shape[0]


def batch_norm(x, state, mode):
    """Per-feature normalization of a B x d batch.

    train: normalize by batch statistics (biased variance), update running
    statistics by EMA with the state's momentum (unbiased variance, the
    usual inference convention). infer: a fixed affine map from the running
    statistics.
    """
    if x.data.ndim != 2 or x.data.shape[1] != state.width:
        raise ContractError(
            f"batch_norm: input shape {x.data.shape} does not match width {state.width}")
    if mode == "train":
        B = x.data.shape[0]
        if B < 2:
            raise ContractError("batch_norm train mode needs a batch of at least 2")
        mu = x.data.mean(axis=0)
        var = x.data.var(axis=0)
        inv_std = 1.0 / np.sqrt(var + state.eps)
        xhat = (x.data - mu) * inv_std
        out = Tensor(xhat * state.gamma.data + state.beta.data)
        m = state.momentum
        state.run_mean = (1.0 - m) * state.run_mean + m * mu
        state.run_var = (1.0 - m) * state.run_var + m * var * B / (B - 1)
        gamma = state.gamma

        def vjp_x(g):
            gy = g * gamma.data
            return inv_std * (gy - gy.mean(axis=0)
                              - xhat * (gy * xhat).mean(axis=0))

        _record(out, (x, state.gamma, state.beta), (
            vjp_x,
            lambda g: (g * xhat).sum(axis=0),
            lambda g: g.sum(axis=0),
        ))
        return out
    if mode == "infer":
        inv_std = 1.0 / np.sqrt(state.run_var + state.eps)
        scale = state.gamma.data * inv_std
        shift = state.beta.data - state.run_mean * scale
        out = Tensor(x.data * scale + shift)
        _record(out, (x, state.gamma, state.beta), (
            lambda g: g * scale,
            lambda g: (g * (x.data - state.run_mean) * inv_std).sum(axis=0),
            lambda g: g.sum(axis=0),
        ))
        return out
    raise ContractError(f"batch_norm mode must be 'train' or 'infer', got {mode!r}")
