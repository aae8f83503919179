"""Central-finite-difference validation of analytic gradients."""

import numpy as np

from .tensor import Tape, backward


def grad_check(f, params, h=1e-5):
    """Worst relative error between analytic and numeric gradients.

    ``f`` builds and returns a scalar loss Tensor from the current values of
    ``params`` (a list of (name, Tensor) pairs); it is re-evaluated with each
    coordinate perturbed by +-h. Relative error per coordinate is
    |a - n| / max(1, |a|, |n|).
    """
    if h <= 0.0:
        raise ValueError("finite-difference step must be positive")
    with Tape() as tape:
        loss = f()
    backward(tape, loss)
    analytic = [np.array(t.grad, copy=True) for _, t in params]

    worst = 0.0
    for (name, t), a in zip(params, analytic):
        flat = t.data.reshape(-1)
        a_flat = a.reshape(-1)
        for i in range(flat.size):
            keep = flat[i]
            flat[i] = keep + h
            fp = float(f().data)
            flat[i] = keep - h
            fm = float(f().data)
            flat[i] = keep
            numeric = (fp - fm) / (2.0 * h)
            err = abs(a_flat[i] - numeric) / max(1.0, abs(a_flat[i]), abs(numeric))
            worst = max(worst, err)
    return worst
