"""Tensor algebra, reverse-mode autodiff, and the AdamW optimizer."""

from .adam import AdamConfig, OptimState, adam_step
from .ops import OPS, apply_op, as_tensor, constant
from .tensor import (
    AllocationMeter,
    Tensor,
    backward,
    engine_mode,
    get_mode,
    grad_enabled,
    meter,
    no_grad,
    set_mode,
    zero_grads,
)
from . import ops

__all__ = [
    "AdamConfig",
    "AllocationMeter",
    "OPS",
    "OptimState",
    "Tensor",
    "adam_step",
    "apply_op",
    "as_tensor",
    "backward",
    "constant",
    "engine_mode",
    "get_mode",
    "grad_enabled",
    "meter",
    "no_grad",
    "ops",
    "set_mode",
    "zero_grads",
]
