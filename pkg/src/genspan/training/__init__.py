"""Loss stack and the deterministic training loop."""

from .loop import (
    BatchSample,
    TraceRow,
    TrainConfig,
    TrainResult,
    contrastive_negatives,
    relevance_labels,
    train,
    write_trace,
)
from .losses import LossConfig, bce_with_logits, loss_bound, loss_cont, loss_rel, total_loss

__all__ = [
    "BatchSample",
    "LossConfig",
    "TraceRow",
    "TrainConfig",
    "TrainResult",
    "bce_with_logits",
    "contrastive_negatives",
    "loss_bound",
    "loss_cont",
    "loss_rel",
    "relevance_labels",
    "total_loss",
    "train",
    "write_trace",
]
