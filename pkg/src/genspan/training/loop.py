"""Training loop: seeded batching, negative sampling, AdamW updates,
per-epoch checkpoints, and a CSV loss trace.

Fully deterministic for a fixed seed: one RNG drives the epoch shuffle,
negative-video choice, and contrastive window picks in program order.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..engine import AdamConfig, OptimState, Tensor, adam_step, backward, zero_grads
from ..errors import NoNegatives, NonFiniteValue, SpecInvalid
from ..data.checkpoint import save_checkpoint
from ..data.types import Corpus, CorpusVideo, GeneratedPrior, QuerySample
from ..model import ModelConfig, forward, init_params
from .losses import LossConfig, loss_bound, loss_cont, loss_rel, total_loss


@dataclass
class BatchSample:
    query: QuerySample
    positive: CorpusVideo
    prior: GeneratedPrior
    negatives: tuple[CorpusVideo, ...] = ()


@dataclass
class TraceRow:
    step: int
    epoch: int
    loss_bound: float
    loss_rel: float
    loss_cont: float
    total: float


@dataclass
class TrainConfig:
    model: ModelConfig = field(default_factory=ModelConfig)
    loss: LossConfig = field(default_factory=LossConfig)
    epochs: int = 20
    batch_size: int = 8
    lr: float = 1e-4
    weight_decay: float = 0.01
    seed: int = 0
    init_seed: int | None = None  # defaults to seed
    query_ids: tuple[str, ...] | None = None  # None trains on every query
    negative_videos: int = 1  # sampled per positive for the all-zero relevance term

    def to_dict(self) -> dict:
        return {
            "model": self.model.to_dict(),
            "loss": self.loss.to_dict(),
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "lr": self.lr,
            "weight_decay": self.weight_decay,
            "seed": self.seed,
            "init_seed": self.init_seed,
            "query_ids": list(self.query_ids) if self.query_ids else None,
        }


@dataclass
class TrainResult:
    params: dict[str, Tensor]
    trace: list[TraceRow]
    checkpoint_paths: list[Path]
    final_step: int


def write_trace(path, rows: list[TraceRow]) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["step", "epoch", "L_bound", "L_rel", "L_cont", "total"])
        for row in rows:
            writer.writerow(
                [row.step, row.epoch, f"{row.loss_bound:.9g}", f"{row.loss_rel:.9g}",
                 f"{row.loss_cont:.9g}", f"{row.total:.9g}"]
            )


def relevance_labels(length: int, span: tuple[int, int] | None) -> np.ndarray:
    labels = np.zeros(length)
    if span is not None:
        labels[span[0] - 1:span[1]] = 1.0
    return labels


def contrastive_negatives(
    positive: CorpusVideo,
    span: tuple[int, int],
    others: list[CorpusVideo],
    rng: np.random.Generator,
    limit: int,
) -> list[np.ndarray]:
    """Non-overlapping same-video windows plus one pooled span per other video."""
    rows = positive.features.array
    start0, end0 = span[0] - 1, span[1] - 1
    window = end0 - start0 + 1
    pools: list[np.ndarray] = []
    for lo in range(0, rows.shape[0] - window + 1, window):
        hi = lo + window - 1
        if hi < start0 or lo > end0:
            pools.append(rows[lo:hi + 1])
    for video in others:
        other_rows = video.features.array
        width = min(window, other_rows.shape[0])
        lo = int(rng.integers(0, other_rows.shape[0] - width + 1))
        pools.append(other_rows[lo:lo + width])
    if not pools:
        raise NoNegatives(
            f"no negative spans available for video {positive.video_id} span {span}"
        )
    return pools[:limit]


def _sample_losses(
    sample: BatchSample,
    corpus: Corpus,
    params: dict[str, Tensor],
    cfg: TrainConfig,
    rng: np.random.Generator,
):
    query = sample.query
    query_vec = corpus.query_vector(query.query_id)
    prior_rows = sample.prior.features.array if sample.prior is not None else None

    out_pos = forward(sample.positive.features, query_vec, prior_rows, params, cfg.model)
    bound = loss_bound(out_pos.p_s, out_pos.p_e, query.gt_span[0], query.gt_span[1])
    rel_terms = [loss_rel(out_pos.r, relevance_labels(sample.positive.length, query.gt_span))]
    for negative in sample.negatives:
        neg_prior = corpus.priors.lookup(query.query_id, negative.video_id)
        neg_rows = neg_prior.features.array if neg_prior is not None else prior_rows
        out_neg = forward(negative.features, query_vec, neg_rows, params, cfg.model)
        rel_terms.append(loss_rel(out_neg.r, relevance_labels(negative.length, None)))
    rel = rel_terms[0]
    for term in rel_terms[1:]:
        rel = rel + term
    rel = rel * (1.0 / len(rel_terms))

    others = list(sample.negatives)
    span_rows = sample.positive.features.array[query.gt_span[0] - 1:query.gt_span[1]]
    pools = contrastive_negatives(sample.positive, query.gt_span, others, rng, cfg.loss.negatives)
    cont = loss_cont(prior_rows if prior_rows is not None else span_rows, span_rows, pools, cfg.loss.tau)
    return bound, rel, cont


def train(
    corpus: Corpus,
    cfg: TrainConfig,
    out_dir=None,
    params: dict[str, Tensor] | None = None,
) -> TrainResult:
    """Epoch loop over shuffled batches with AdamW and per-epoch checkpoints."""
    cfg.model.validate()
    cfg.loss.validate()
    if cfg.model.dim != corpus.dim:
        raise SpecInvalid(f"model dim {cfg.model.dim} != corpus d {corpus.dim}")
    queries = [
        q for q in corpus.queries
        if cfg.query_ids is None or q.query_id in set(cfg.query_ids)
    ]
    if not queries:
        raise SpecInvalid("no training queries selected")
    needs_prior = cfg.model.selector_mode != "off"
    for q in queries:
        if needs_prior and corpus.priors.lookup(q.query_id, q.gt_video_id) is None:
            raise SpecInvalid(f"query {q.query_id} has no resolvable prior")

    if params is None:
        params = init_params(cfg.model, cfg.init_seed if cfg.init_seed is not None else cfg.seed)
    state = OptimState(params, AdamConfig(lr=cfg.lr, weight_decay=cfg.weight_decay))
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, len(queries)]))

    out_path = Path(out_dir) if out_dir is not None else None
    if out_path is not None:
        out_path.mkdir(parents=True, exist_ok=True)

    trace: list[TraceRow] = []
    checkpoints: list[Path] = []
    step = 0
    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(len(queries))
        for lo in range(0, len(order), cfg.batch_size):
            batch_idx = order[lo:lo + cfg.batch_size]
            batch: list[BatchSample] = []
            for qi in batch_idx:
                query = queries[int(qi)]
                positive = corpus.video_by_id(query.gt_video_id)
                prior = corpus.priors.lookup(query.query_id, query.gt_video_id)
                negatives = []
                if len(corpus.videos) > 1:
                    pos_index = corpus.video_index(query.gt_video_id)
                    wanted = min(cfg.negative_videos, len(corpus.videos) - 1)
                    while len(negatives) < wanted:
                        choice = int(rng.integers(0, len(corpus.videos) - 1))
                        if choice >= pos_index:
                            choice += 1
                        if all(v.video_id != corpus.videos[choice].video_id for v in negatives):
                            negatives.append(corpus.videos[choice])
                batch.append(
                    BatchSample(query=query, positive=positive, prior=prior, negatives=tuple(negatives))
                )

            zero_grads(params)
            bound_vals, rel_vals, cont_vals = [], [], []
            batch_total = None
            for sample in batch:
                bound, rel, cont = _sample_losses(sample, corpus, params, cfg, rng)
                sample_total = total_loss(bound, rel, cont, cfg.loss)
                bound_vals.append(float(bound.data))
                rel_vals.append(float(rel.data))
                cont_vals.append(cont)
                batch_total = sample_total if batch_total is None else batch_total + sample_total
            batch_total = batch_total * (1.0 / len(batch))
            value = float(batch_total.data)
            if not np.isfinite(value):
                raise NonFiniteValue(f"training loss diverged at step {step}")
            if min(bound_vals) < 0 or min(rel_vals) < 0 or min(cont_vals) < 0:
                raise NonFiniteValue(f"negative loss component at step {step}")
            backward(batch_total)
            grads = {name: p.grad_or_zeros() for name, p in params.items()}
            adam_step(params, grads, state)
            step += 1
            trace.append(
                TraceRow(
                    step=step,
                    epoch=epoch,
                    loss_bound=float(np.mean(bound_vals)),
                    loss_rel=float(np.mean(rel_vals)),
                    loss_cont=float(np.mean(cont_vals)),
                    total=value,
                )
            )
        if out_path is not None:
            ckpt = out_path / f"epoch{epoch:03d}.ckpt"
            save_checkpoint(ckpt, params, step=step, config=cfg.model.to_dict())
            checkpoints.append(ckpt)

    if out_path is not None:
        write_trace(out_path / "loss_trace.csv", trace)
        if not checkpoints:  # 0-epoch run still leaves a usable checkpoint
            ckpt = out_path / "epoch000.ckpt"
            save_checkpoint(ckpt, params, step=0, config=cfg.model.to_dict())
            checkpoints.append(ckpt)
    return TrainResult(params=params, trace=trace, checkpoint_paths=checkpoints, final_step=step)
