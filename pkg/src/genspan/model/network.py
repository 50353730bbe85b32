"""Forward model: relational embedding, prior-guided token selection,
bidirectional state-space backbone, scatter-back, and prediction heads.

Clip indices crossing this module's public boundary are 1-based
inclusive. Selected tokens keep their original temporal positions and
are multiplied by a sigmoid gate of their selector score so the selector
weights receive gradients through the hard top-k choice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..engine import Tensor, ops
from ..errors import DimMismatch, IndexOutOfRange, SpecInvalid
from .config import ModelConfig


@dataclass
class ModelOutput:
    p_s: Tensor  # (L,) start logits on the full timeline
    p_e: Tensor  # (L,) end logits
    r: Tensor  # (L,) clip relevance in (0, 1)
    r_logit: Tensor  # (L,) relevance pre-sigmoid
    selector_scores: Tensor | None  # (L,) in select mode, else None
    indices: tuple[int, ...]  # kept positions, 1-based ascending


def relational_embed(e_o: Tensor, weight: Tensor) -> Tensor:
    """Graph message pass over clip tokens; returns the relational term.

    Adjacency is the positive part of pairwise cosines of the rows,
    row-sum normalized (isolated rows keep a unit self-loop).
    """
    normalized = ops.normalize_rows(e_o)
    adjacency = ops.relu(ops.matmul(normalized, ops.transpose(normalized)))
    adjacency = ops.row_sum_normalize(adjacency)
    return ops.silu(ops.matmul(ops.matmul(adjacency, e_o), weight))


def embed_tokens(e_o: Tensor, params: dict[str, Tensor], config: ModelConfig) -> Tensor:
    """Residual stack of relational embeddings: x = e + rel(e), repeated."""
    x = e_o
    for i in range(config.gcn_layers):
        weight = params["gcn.W"] if i == 0 else params[f"gcn.W{i}"]
        x = ops.add(x, relational_embed(x, weight))
    return x


def selector_cues(x: Tensor, query_vec: np.ndarray, prior_rows: np.ndarray) -> Tensor:
    """Three cues per token: query cosine, best prior cosine, motion span."""
    length = x.data.shape[0]
    qn = np.linalg.norm(query_vec)
    if qn > 0:
        cue_query = ops.cosine_rows(x, ops.constant(query_vec))
    else:
        cue_query = ops.constant(np.zeros(length))
    if prior_rows is not None and prior_rows.size and np.linalg.norm(prior_rows) > 0:
        cue_prior = ops.max_axis(ops.cosine_matrix(x, ops.constant(prior_rows)), axis=1)
    else:
        cue_prior = ops.constant(np.zeros(length))
    cue_motion = ops.motion_saliency(x)
    return ops.stack_cols([cue_query, cue_prior, cue_motion])


def selector_scores(
    x: Tensor,
    query_vec: np.ndarray,
    prior_rows: np.ndarray,
    weight: Tensor,
    bias: Tensor,
) -> Tensor:
    cues = selector_cues(x, query_vec, prior_rows)
    return ops.add(ops.matvec(cues, weight), bias)


def keep_count(keep_ratio: float, length: int) -> int:
    return max(1, math.floor(keep_ratio * length))


def select_tokens(
    x: Tensor, scores: Tensor, keep_ratio: float
) -> tuple[Tensor, tuple[int, ...], Tensor]:
    """Keep the top-scoring tokens in temporal order, gated by sigmoid(score).

    Ties break toward the earlier position. Returns (gated rows, 1-based
    indices ascending, gate values).
    """
    if not (0.0 < keep_ratio <= 1.0):
        raise SpecInvalid(f"keep_ratio {keep_ratio} outside (0, 1]")
    length = x.data.shape[0]
    if scores.data.shape != (length,):
        raise DimMismatch(f"selector scores {scores.data.shape} for {length} tokens")
    kept = keep_count(keep_ratio, length)
    order = np.argsort(-scores.data, kind="stable")  # stable: earlier index wins ties
    chosen = np.sort(order[:kept])
    gates = ops.sigmoid(ops.gather_rows(scores, chosen))
    rows = ops.scale_rows(ops.gather_rows(x, chosen), gates)
    return rows, tuple(int(i) + 1 for i in chosen), gates


def ssm_layer(x: Tensor, params: dict[str, Tensor], prefix: str, backward_direction: bool) -> Tensor:
    """Depthwise conv + SiLU + diagonal linear recurrence in one direction."""
    seq = ops.reverse_rows(x) if backward_direction else x
    u = ops.silu(ops.conv1d_depthwise(seq, params[f"{prefix}.conv"]))
    driven = ops.matmul(u, ops.transpose(params[f"{prefix}.B"]))
    states = ops.diag_scan(ops.sigmoid(params[f"{prefix}.A_raw"]), driven)
    y = ops.matmul(states, ops.transpose(params[f"{prefix}.C"]))
    return ops.reverse_rows(y) if backward_direction else y


def backbone(x: Tensor, params: dict[str, Tensor], config: ModelConfig) -> Tensor:
    """Stacked bidirectional layers: layernorm(x + fwd(x) + bwd(x))."""
    for i in range(config.num_layers):
        forward_out = ssm_layer(x, params, f"layer{i}.fwd", backward_direction=False)
        backward_out = ssm_layer(x, params, f"layer{i}.bwd", backward_direction=True)
        x = ops.layernorm_rows(
            ops.add(ops.add(x, forward_out), backward_out),
            params[f"layer{i}.ln.scale"],
            params[f"layer{i}.ln.shift"],
        )
    return x


def scatter_and_heads(
    f_s: Tensor, indices: tuple[int, ...], length: int, params: dict[str, Tensor]
) -> tuple[Tensor, Tensor, Tensor, Tensor]:
    """Scatter selected features to the full timeline and apply the heads.

    Unselected positions carry zero features: start/end logits 0 and
    relevance sigmoid(0) = 0.5 there.
    """
    if list(indices) != sorted(set(indices)):
        raise IndexOutOfRange("indices must be strictly ascending")
    if indices and (indices[0] < 1 or indices[-1] > length):
        raise IndexOutOfRange(f"indices outside [1, {length}]")
    zero_based = [i - 1 for i in indices]
    full = ops.scatter_rows(f_s, zero_based, length)
    p_s = ops.flatten(ops.matmul(full, ops.transpose(params["head.Ws"])))
    p_e = ops.flatten(ops.matmul(full, ops.transpose(params["head.We"])))
    r_logit = ops.flatten(ops.matmul(full, ops.transpose(params["head.Wr"])))
    return p_s, p_e, ops.sigmoid(r_logit), r_logit


def forward(
    features,
    query_vec: np.ndarray,
    prior_rows,
    params: dict[str, Tensor],
    config: ModelConfig,
) -> ModelOutput:
    """Full forward pass for one candidate video.

    features: (L, d) array or FeatureSequence; query_vec: (d,) array;
    prior_rows: (L_g, d) array, FeatureSequence, or None (required unless
    selector_mode is "off").
    """
    config.validate()
    feats = np.asarray(features.array if hasattr(features, "array") else features)
    if feats.ndim != 2 or feats.shape[1] != config.dim:
        raise DimMismatch(f"features {feats.shape} vs model dim {config.dim}")
    length = feats.shape[0]
    query_vec = np.asarray(query_vec, dtype=np.float64)
    if query_vec.shape != (config.dim,):
        raise DimMismatch(f"query vector {query_vec.shape} vs model dim {config.dim}")
    prior = None
    if config.selector_mode != "off":
        if prior_rows is None:
            raise SpecInvalid(f"selector_mode={config.selector_mode!r} requires a prior")
        prior = np.asarray(prior_rows.array if hasattr(prior_rows, "array") else prior_rows)
        if prior.ndim != 2 or prior.shape[1] != config.dim:
            raise DimMismatch(f"prior {prior.shape} vs model dim {config.dim}")

    x = embed_tokens(Tensor(feats), params, config)

    if config.selector_mode == "select":
        scores = selector_scores(x, query_vec, prior, params["selector.w"], params["selector.b"])
        kept_rows, indices, _ = select_tokens(x, scores, config.keep_ratio)
        contextual = backbone(kept_rows, params, config)
        p_s, p_e, r, r_logit = scatter_and_heads(contextual, indices, length, params)
        return ModelOutput(p_s=p_s, p_e=p_e, r=r, r_logit=r_logit, selector_scores=scores, indices=indices)

    if config.selector_mode == "concat":
        prior_kept = prior
        if config.keep_ratio_on_prior and prior.shape[0] > 1:
            # Alternative keep-ratio reading: prune prior tokens by query cosine.
            kept = keep_count(config.keep_ratio, prior.shape[0])
            qn = np.linalg.norm(query_vec)
            if qn > 0:
                norms = np.linalg.norm(prior, axis=1)
                cos = prior @ query_vec / (np.where(norms > 0, norms, 1.0) * qn)
            else:
                cos = np.zeros(prior.shape[0])
            chosen = np.sort(np.argsort(-cos, kind="stable")[:kept])
            prior_kept = prior[chosen]
        sequence = ops.concat_rows(ops.constant(prior_kept), x)
        contextual = ops.slice_rows(
            backbone(sequence, params, config), prior_kept.shape[0], prior_kept.shape[0] + length
        )
        identity = tuple(range(1, length + 1))
        p_s, p_e, r, r_logit = scatter_and_heads(contextual, identity, length, params)
        return ModelOutput(p_s=p_s, p_e=p_e, r=r, r_logit=r_logit, selector_scores=None, indices=identity)

    # "off": text-only path, the prior is ignored entirely.
    contextual = backbone(x, params, config)
    identity = tuple(range(1, length + 1))
    p_s, p_e, r, r_logit = scatter_and_heads(contextual, identity, length, params)
    return ModelOutput(p_s=p_s, p_e=p_e, r=r, r_logit=r_logit, selector_scores=None, indices=identity)
