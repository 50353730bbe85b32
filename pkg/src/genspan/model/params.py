"""Parameter initialization under stable checkpoint names.

Weights draw uniform +-1/sqrt(fan_in); transition pre-activations start
at +2 (decay about 0.88, long memory); biases and layer-norm shifts are
zero; layer-norm scales are one. The selector aggregates three
non-negative relevance cues, so its weights draw from the positive half
interval [0, 2/sqrt(3)) - a sign-symmetric start would order tokens
against the cues half the time and stall early selection.
"""

from __future__ import annotations

import numpy as np

from ..engine import Tensor
from .config import ModelConfig


def _uniform(rng: np.random.Generator, shape: tuple[int, ...], fan_in: int) -> np.ndarray:
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape)


def param_names(config: ModelConfig) -> list[str]:
    names = ["gcn.W"]
    names += [f"gcn.W{i}" for i in range(1, config.gcn_layers)]
    names += ["selector.w", "selector.b"]
    for i in range(config.num_layers):
        for direction in ("fwd", "bwd"):
            names += [
                f"layer{i}.{direction}.A_raw",
                f"layer{i}.{direction}.B",
                f"layer{i}.{direction}.C",
                f"layer{i}.{direction}.conv",
            ]
        names += [f"layer{i}.ln.scale", f"layer{i}.ln.shift"]
    names += ["head.Ws", "head.We", "head.Wr"]
    return names


def init_params(config: ModelConfig, seed: int) -> dict[str, Tensor]:
    config.validate()
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    d, n, k = config.dim, config.state_size, config.conv_kernel
    params: dict[str, np.ndarray] = {}
    params["gcn.W"] = _uniform(rng, (d, d), d)
    for i in range(1, config.gcn_layers):
        params[f"gcn.W{i}"] = _uniform(rng, (d, d), d)
    params["selector.w"] = rng.uniform(0.0, 2.0 / np.sqrt(3), size=3)
    params["selector.b"] = np.zeros(1)
    for i in range(config.num_layers):
        for direction in ("fwd", "bwd"):
            prefix = f"layer{i}.{direction}"
            params[f"{prefix}.A_raw"] = np.full(n, 2.0)
            params[f"{prefix}.B"] = _uniform(rng, (n, d), d)
            params[f"{prefix}.C"] = _uniform(rng, (d, n), n)
            params[f"{prefix}.conv"] = _uniform(rng, (k, d), k)
        params[f"layer{i}.ln.scale"] = np.ones(d)
        params[f"layer{i}.ln.shift"] = np.zeros(d)
    params["head.Ws"] = _uniform(rng, (1, d), d)
    params["head.We"] = _uniform(rng, (1, d), d)
    params["head.Wr"] = _uniform(rng, (1, d), d)
    ordered = param_names(config)
    return {name: Tensor(params[name]) for name in ordered}
