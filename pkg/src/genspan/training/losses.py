"""Boundary, relevance, and contrastive losses with their weighted sum.

Boundary BCE works on logits in the stable softplus form. Relevance BCE
works on probabilities (clamped away from 0/1 before the log so training
in 32-bit mode cannot produce infinities). The contrastive term compares
pooled input features only, so it carries no parameter gradient; it is
computed in float64 with a canonical summation order, which makes it
exactly invariant to permuting the negative pool.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..engine import Tensor, get_mode, ops
from ..errors import NoNegatives, NonFiniteValue, ProbOutOfRange, SpanOutOfBounds


@dataclass
class LossConfig:
    lambda_bound: float = 1.0
    lambda_rel: float = 0.5
    lambda_cont: float = 0.1
    tau: float = 0.07
    negatives: int = 15

    def validate(self) -> None:
        if min(self.lambda_bound, self.lambda_rel, self.lambda_cont) < 0:
            raise NonFiniteValue("loss weights must be >= 0")
        if self.tau <= 0:
            raise NonFiniteValue("temperature must be > 0")

    def to_dict(self) -> dict:
        return {
            "lambda_bound": self.lambda_bound,
            "lambda_rel": self.lambda_rel,
            "lambda_cont": self.lambda_cont,
            "tau": self.tau,
            "negatives": self.negatives,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "LossConfig":
        cfg = cls()
        for key in ("lambda_bound", "lambda_rel", "lambda_cont", "tau"):
            if key in doc:
                setattr(cfg, key, float(doc[key]))
        if "negatives" in doc:
            cfg.negatives = int(doc["negatives"])
        cfg.validate()
        return cfg


def bce_with_logits(logits: Tensor, targets: np.ndarray) -> Tensor:
    """mean(softplus(z) - z * y): stable BCE for 0/1 targets."""
    y = ops.constant(np.asarray(targets, dtype=float))
    return ops.mean(ops.sub(ops.softplus(logits), ops.mul(logits, y)))


def loss_bound(p_s: Tensor, p_e: Tensor, start: int, end: int) -> Tensor:
    """One-hot boundary BCE over start and end logits (mean over clips each)."""
    length = p_s.data.shape[0]
    if not (1 <= start <= end <= length):
        raise SpanOutOfBounds(f"span ({start}, {end}) outside 1..{length}")
    one_hot_s = np.zeros(length)
    one_hot_s[start - 1] = 1.0
    one_hot_e = np.zeros(length)
    one_hot_e[end - 1] = 1.0
    return ops.add(bce_with_logits(p_s, one_hot_s), bce_with_logits(p_e, one_hot_e))


def loss_rel(r: Tensor, labels: np.ndarray) -> Tensor:
    """Clip-relevance BCE on probabilities; labels are 0/1 per clip."""
    labels = np.asarray(labels, dtype=float)
    if r.data.shape != labels.shape:
        raise SpanOutOfBounds(f"relevance {r.data.shape} vs labels {labels.shape}")
    if r.data.min() < 0.0 or r.data.max() > 1.0:
        raise ProbOutOfRange(f"relevance values outside [0, 1]: {r.data.min()}..{r.data.max()}")
    eps = 1e-12 if get_mode() == "test" else 1e-7
    clipped = ops.clamp(r, eps, 1.0 - eps)
    y = ops.constant(labels)
    pos = ops.mul(ops.log(clipped), y)
    neged = ops.mul(ops.log(ops.sub(ops.constant(np.ones_like(labels)), clipped)), ops.constant(1.0 - labels))
    return ops.neg(ops.mean(ops.add(pos, neged)))


def _unit(v: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(v)
    return v / n if n > 0 else v


def loss_cont(
    prior_rows: np.ndarray,
    positive_rows: np.ndarray,
    negative_pools: list[np.ndarray],
    tau: float = 0.07,
) -> float:
    """InfoNCE between the pooled prior and the pooled positive span.

    Anchor and targets are mean-pooled over clips; similarity is cosine.
    Negatives may be any pooled clip spans (same video or others).
    """
    if len(negative_pools) < 1:
        raise NoNegatives("contrastive loss needs at least one negative pool")
    anchor = _unit(np.asarray(prior_rows, dtype=np.float64).mean(axis=0))
    positive = _unit(np.asarray(positive_rows, dtype=np.float64).mean(axis=0))
    pos_logit = float(anchor @ positive) / tau
    neg_logits = sorted(
        float(anchor @ _unit(np.asarray(pool, dtype=np.float64).mean(axis=0))) / tau
        for pool in negative_pools
    )
    logits = np.array([pos_logit] + neg_logits)
    peak = logits.max()
    lse = peak + np.log(np.exp(logits - peak).sum())
    value = float(lse - pos_logit)
    if not np.isfinite(value):
        raise NonFiniteValue("contrastive loss diverged")
    return value


def total_loss(bound: Tensor, rel: Tensor, cont: float, config: LossConfig) -> Tensor:
    """lambda-weighted sum; the contrastive part enters as a constant."""
    config.validate()
    weighted = ops.add(
        ops.scale(bound, config.lambda_bound),
        ops.scale(rel, config.lambda_rel),
    )
    return ops.add(weighted, ops.constant(config.lambda_cont * cont))
