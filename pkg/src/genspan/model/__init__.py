"""Prior-guided token selection over a bidirectional SSM backbone."""

from .config import ModelConfig, SELECTOR_MODES
from .network import (
    ModelOutput,
    backbone,
    embed_tokens,
    forward,
    keep_count,
    relational_embed,
    scatter_and_heads,
    select_tokens,
    selector_cues,
    selector_scores,
    ssm_layer,
)
from .params import init_params, param_names

__all__ = [
    "ModelConfig",
    "ModelOutput",
    "SELECTOR_MODES",
    "backbone",
    "embed_tokens",
    "forward",
    "init_params",
    "keep_count",
    "param_names",
    "relational_embed",
    "scatter_and_heads",
    "select_tokens",
    "selector_cues",
    "selector_scores",
    "ssm_layer",
]
