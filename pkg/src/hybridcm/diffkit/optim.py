"""Adam / AdamW with bias correction, plus the stage learning-rate schedule."""

import numpy as np

from ..errors import ContractError


class OptimizerState:
    """First/second-moment accumulators keyed by parameter name.

    Accumulators are created lazily at zero; the step counter increments by
    exactly one per call.
    """

    def __init__(self, lr=0.001, beta1=0.9, beta2=0.999, eps=1e-8,
                 weight_decay=0.0):
        if weight_decay < 0.0:
            raise ContractError("weight decay must be non-negative")
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.weight_decay = weight_decay
        self.t = 0
        self.m = {}
        self.v = {}


def adam_step(state, params, grads):
    """One bias-corrected Adam update, in place.

    ``params`` is a list of (name, array) pairs; ``grads`` the matching
    gradient arrays. A non-finite gradient rejects the whole step.
    """
    return adamw_step(state, params, grads, lam=0.0)


def adamw_step(state, params, grads, lam=None):
    """Adam plus decoupled weight decay: w -= lr * lam * w after the update.

    lam=0 reduces exactly to adam_step.
    """
    if lam is None:
        lam = state.weight_decay
    if lam < 0.0:
        raise ContractError("weight decay must be non-negative")
    if len(params) != len(grads):
        raise ContractError("params and grads length mismatch")
    for (name, p), g in zip(params, grads):
        if g is None or not np.all(np.isfinite(g)):
            raise ContractError(
                f"step {state.t + 1} rejected: non-finite gradient for {name!r}")
        if g.shape != p.shape:
            raise ContractError(f"gradient shape mismatch for {name!r}")
    state.t += 1
    b1, b2 = state.beta1, state.beta2
    bc1 = 1.0 - b1 ** state.t
    bc2 = 1.0 - b2 ** state.t
    for (name, p), g in zip(params, grads):
        m = state.m.get(name)
        if m is None:
            m = np.zeros_like(p)
            v = np.zeros_like(p)
        else:
            v = state.v[name]
        m = b1 * m + (1.0 - b1) * g
        v = b2 * v + (1.0 - b2) * (g * g)
        state.m[name] = m
        state.v[name] = v
        p -= state.lr * (m / bc1) / (np.sqrt(v / bc2) + state.eps)
        if lam != 0.0:
            p -= state.lr * lam * p
    return params


def lr_schedule(step, total_steps, lr_max=0.1, lr_min=0.001, shape="steps"):
    """Monotone non-increasing rate from lr_max down to lr_min.

    shape="steps" (default): x0.1 at 50% and 75% of the run.
    shape="linear" / "cosine": the usual interpolants over [0, total_steps].
    """
    if lr_min > lr_max:
        raise ContractError("lr_min must not exceed lr_max")
    if not 0 <= step <= total_steps:
        raise ContractError(f"step {step} outside [0, {total_steps}]")
    if total_steps == 0:
        return lr_min
    frac = step / total_steps
    if shape == "steps":
        if frac < 0.5:
            return lr_max
        if frac < 0.75:
            return max(lr_max * 0.1, lr_min)
        return lr_min
    if shape == "linear":
        return lr_max + (lr_min - lr_max) * frac
    if shape == "cosine":
        return lr_min + 0.5 * (lr_max - lr_min) * (1.0 + np.cos(np.pi * frac))
    raise ContractError(f"unknown schedule shape {shape!r}")
