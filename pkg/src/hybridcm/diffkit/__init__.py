from .tensor import (
    BatchNormState,
    Tape,
    Tensor,
    activation,
    add,
    affine,
    backward,
    batch_norm,
    clip,
    div,
    exp,
    gather_rows,
    log,
    log_sum_exp,
    matmul,
    mul,
    relu,
    sigmoid,
    sqrt,
    square,
    sub,
    tanh,
    tmean,
    transpose,
    tsum,
)
from .optim import OptimizerState, adam_step, adamw_step, lr_schedule
from .gradcheck import grad_check

__all__ = [
    "BatchNormState", "Tape", "Tensor", "activation", "add", "affine",
    "backward", "batch_norm", "clip", "div", "exp", "gather_rows", "log",
    "log_sum_exp", "matmul", "mul", "relu", "sigmoid", "sqrt", "square",
    "sub", "tanh", "tmean", "transpose", "tsum",
    "OptimizerState", "adam_step", "adamw_step", "lr_schedule", "grad_check",
]
