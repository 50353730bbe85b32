"""Span enumeration, tuple scoring, NMS, and corpus-level ranking.

A moment's score is sigmoid(start logit) * sigmoid(end logit) * mean clip
relevance over the span. All spans up to a maximum length are enumerated
via prefix sums; ranking is a pure function of checkpoint + corpus with
fully specified tie-breaking (score, then video index, then start, then
end), so ranked lists are bitwise reproducible.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .engine import Tensor, no_grad
from .errors import EmptyQuerySet, SpecInvalid, UnknownVideo
from .data.types import Corpus, QuerySample
from .model import ModelConfig, forward

TASKS = ("VCMR", "VMR", "VR")


@dataclass(frozen=True)
class MomentCandidate:
    video: int  # corpus video index
    start: int  # 1-based inclusive clip index
    end: int
    score: float

    def __post_init__(self) -> None:
        if self.start > self.end:
            raise SpecInvalid(f"candidate span ({self.start}, {self.end}) inverted")


@dataclass
class RankConfig:
    max_span: int = 24
    nms_threshold: float = 0.5
    top_videos: int = 10
    k_values: tuple[int, ...] = (1, 5, 10)
    iou_thresholds: tuple[float, ...] = (0.5, 0.7)
    export_top: int = 100

    def validate(self) -> None:
        if self.max_span < 1 or self.top_videos < 1 or self.export_top < 1:
            raise SpecInvalid("max_span, top_videos, export_top must be >= 1")
        if not (0.0 < self.nms_threshold <= 1.0):
            raise SpecInvalid(f"nms_threshold {self.nms_threshold} outside (0, 1]")

    def to_dict(self) -> dict:
        return {
            "max_span": self.max_span,
            "nms_threshold": self.nms_threshold,
            "top_videos": self.top_videos,
            "k_values": list(self.k_values),
            "iou_thresholds": list(self.iou_thresholds),
            "export_top": self.export_top,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "RankConfig":
        cfg = cls()
        for key in ("max_span", "top_videos", "export_top"):
            if key in doc:
                setattr(cfg, key, int(doc[key]))
        if "nms_threshold" in doc:
            cfg.nms_threshold = float(doc["nms_threshold"])
        if "k_values" in doc:
            cfg.k_values = tuple(int(k) for k in doc["k_values"])
        if "iou_thresholds" in doc:
            cfg.iou_thresholds = tuple(float(m) for m in doc["iou_thresholds"])
        cfg.validate()
        return cfg


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x, dtype=np.float64)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def span_score_arrays(
    p_s: np.ndarray, p_e: np.ndarray, r: np.ndarray, max_span: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All (start, end, score) triples with span length <= max_span.

    Returns 1-based index arrays ordered by (start, length); mean
    relevance comes from a prefix sum, so the total cost is O(L * max_span).
    """
    length = p_s.shape[0]
    sig_s = _sigmoid(np.asarray(p_s, dtype=np.float64))
    sig_e = _sigmoid(np.asarray(p_e, dtype=np.float64))
    prefix = np.concatenate([[0.0], np.cumsum(np.asarray(r, dtype=np.float64))])
    starts, ends, scores = [], [], []
    for width in range(1, min(max_span, length) + 1):
        s0 = np.arange(0, length - width + 1)
        e0 = s0 + width - 1
        mean_rel = (prefix[e0 + 1] - prefix[s0]) / width
        starts.append(s0 + 1)
        ends.append(e0 + 1)
        scores.append(sig_s[s0] * sig_e[e0] * mean_rel)
    order = np.lexsort((np.concatenate(ends), np.concatenate(starts)))
    return (
        np.concatenate(starts)[order],
        np.concatenate(ends)[order],
        np.concatenate(scores)[order],
    )


def score_spans(p_s, p_e, r, max_span: int, video: int = 0) -> list[MomentCandidate]:
    """Materialized candidate list for one video (see span_score_arrays)."""
    if max_span < 1:
        raise SpecInvalid(f"max_span {max_span} must be >= 1")
    p_s = p_s.data if isinstance(p_s, Tensor) else np.asarray(p_s)
    p_e = p_e.data if isinstance(p_e, Tensor) else np.asarray(p_e)
    r = r.data if isinstance(r, Tensor) else np.asarray(r)
    starts, ends, scores = span_score_arrays(p_s, p_e, r, max_span)
    return [
        MomentCandidate(video=video, start=int(s), end=int(e), score=float(v))
        for s, e, v in zip(starts, ends, scores)
    ]


def temporal_iou(a: tuple[int, int], b: tuple[int, int]) -> float:
    """Intersection over union in clip counts for inclusive spans."""
    inter = min(a[1], b[1]) - max(a[0], b[0]) + 1
    if inter <= 0:
        return 0.0
    union = (a[1] - a[0] + 1) + (b[1] - b[0] + 1) - inter
    return inter / union


def nms(candidates: list[MomentCandidate], threshold: float) -> list[MomentCandidate]:
    """Greedy suppression of overlapping spans from one video.

    Candidates are visited by descending score (ties: earlier start, then
    earlier end, then insertion order); a candidate is dropped when its
    IoU with an accepted one exceeds the threshold.
    """
    if not candidates:
        return []
    starts = np.array([c.start for c in candidates], dtype=np.float64)
    ends = np.array([c.end for c in candidates], dtype=np.float64)
    scores = np.array([c.score for c in candidates], dtype=np.float64)
    # lexsort: last key is primary
    order = np.lexsort((np.arange(len(candidates)), ends, starts, -scores))
    kept: list[int] = []
    while order.size:
        best = order[0]
        kept.append(int(best))
        order = order[1:]
        if not order.size:
            break
        inter = np.minimum(ends[best], ends[order]) - np.maximum(starts[best], starts[order]) + 1
        inter = np.maximum(inter, 0.0)
        union = (ends[best] - starts[best] + 1) + (ends[order] - starts[order] + 1) - inter
        order = order[inter / union <= threshold]
    return [candidates[i] for i in kept]


@dataclass
class VideoRanking:
    video: int
    vr_score: float  # max span score before suppression
    survivors: list[MomentCandidate]


def _rank_one_video(
    video_index: int,
    query: QuerySample,
    corpus: Corpus,
    params,
    model_config: ModelConfig,
    rank_config: RankConfig,
) -> VideoRanking:
    video = corpus.videos[video_index]
    prior = corpus.priors.lookup(query.query_id, video.video_id)
    prior_rows = prior.features.array if prior is not None else None
    with no_grad():
        out = forward(
            video.features,
            corpus.query_vector(query.query_id),
            prior_rows,
            params,
            model_config,
        )
        starts, ends, scores = span_score_arrays(
            out.p_s.data, out.p_e.data, out.r.data, rank_config.max_span
        )
    vr_score = float(scores.max())
    candidates = [
        MomentCandidate(video=video_index, start=int(s), end=int(e), score=float(v))
        for s, e, v in zip(starts, ends, scores)
    ]
    return VideoRanking(
        video=video_index,
        vr_score=vr_score,
        survivors=nms(candidates, rank_config.nms_threshold),
    )


def rank_corpus(
    query: QuerySample,
    corpus: Corpus,
    params,
    model_config: ModelConfig,
    rank_config: RankConfig,
    mode: str = "VCMR",
    threads: int = 1,
) -> list[MomentCandidate]:
    """Ranked moment tuples for one query under VCMR, VMR, or VR rules.

    VCMR scores every video, shortlists the best by per-video max score,
    merges their NMS survivors, and sorts globally. VMR restricts to the
    annotated video. VR keeps one entry per video (its best span) ordered
    by the pre-suppression maximum.
    """
    if mode not in TASKS:
        raise SpecInvalid(f"mode {mode!r} not in {TASKS}")
    rank_config.validate()

    if mode == "VMR":
        if query.gt_video_id not in {v.video_id for v in corpus.videos}:
            raise UnknownVideo(f"VMR target {query.gt_video_id} not in corpus")
        indices = [corpus.video_index(query.gt_video_id)]
    else:
        indices = list(range(len(corpus.videos)))

    if threads > 1 and len(indices) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rankings = list(
                pool.map(
                    lambda i: _rank_one_video(i, query, corpus, params, model_config, rank_config),
                    indices,
                )
            )
    else:
        rankings = [
            _rank_one_video(i, query, corpus, params, model_config, rank_config) for i in indices
        ]

    if mode == "VR":
        ordered = sorted(rankings, key=lambda vr: (-vr.vr_score, vr.video))
        out = []
        for vr in ordered:
            best = max(vr.survivors, key=lambda c: (c.score, -c.start, -c.end))
            out.append(MomentCandidate(video=vr.video, start=best.start, end=best.end, score=vr.vr_score))
        return out

    if mode == "VCMR" and len(rankings) > rank_config.top_videos:
        shortlisted = sorted(rankings, key=lambda vr: (-vr.vr_score, vr.video))
        rankings = shortlisted[: rank_config.top_videos]

    merged = [c for vr in rankings for c in vr.survivors]
    merged.sort(key=lambda c: (-c.score, c.video, c.start, c.end))
    return merged


def write_ranking_csv(path, rows: list[tuple[str, str, MomentCandidate]]) -> None:
    """Rows are (query_id, video_id, candidate) already in rank order per query."""
    import csv

    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["rank", "query_id", "video_id", "t_s", "t_e", "psi"])
        rank = 0
        last_query = None
        for query_id, video_id, cand in rows:
            rank = rank + 1 if query_id == last_query else 1
            last_query = query_id
            writer.writerow([rank, query_id, video_id, cand.start, cand.end, f"{cand.score:.9g}"])
