"""Adam with decoupled weight decay over named parameter dicts.

Decay is applied directly to the parameter values before the moment
update, never through the gradients.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DimMismatch
from .tensor import Tensor


@dataclass
class AdamConfig:
    lr: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    weight_decay: float = 0.01


class OptimState:
    """Per-parameter first/second moments plus the shared step counter."""

    def __init__(self, params: dict[str, Tensor], config: AdamConfig | None = None) -> None:
        self.config = config or AdamConfig()
        self.step_count = 0
        self.m = {name: np.zeros_like(p.data) for name, p in params.items()}
        self.v = {name: np.zeros_like(p.data) for name, p in params.items()}


def adam_step(
    params: dict[str, Tensor],
    grads: dict[str, np.ndarray],
    state: OptimState,
) -> tuple[dict[str, Tensor], OptimState]:
    """One optimizer step; parameter tensors are updated in place."""
    cfg = state.config
    state.step_count += 1
    t = state.step_count
    bc1 = 1.0 - cfg.beta1 ** t
    bc2 = 1.0 - cfg.beta2 ** t
    for name, p in params.items():
        g = grads.get(name)
        if g is None:
            g = np.zeros_like(p.data)
        if g.shape != p.data.shape:
            raise DimMismatch(f"adam_step: grad {g.shape} for param {name} {p.data.shape}")
        m = state.m[name]
        v = state.v[name]
        if m.shape != p.data.shape:
            raise DimMismatch(f"adam_step: stale state for param {name}")
        if cfg.weight_decay != 0.0:
            p.data *= 1.0 - cfg.lr * cfg.weight_decay
        m *= cfg.beta1
        m += (1.0 - cfg.beta1) * g
        v *= cfg.beta2
        v += (1.0 - cfg.beta2) * g * g
        p.data -= cfg.lr * (m / bc1) / (np.sqrt(v / bc2) + cfg.eps)
    return params, state
