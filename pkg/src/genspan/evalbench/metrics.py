"""Recall metrics over ranked moment lists plus the verb-count breakdown."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..errors import EmptyQuerySet, MissingAnnotation, SpecInvalid
from ..retrieval import MomentCandidate, temporal_iou

TASKS = ("VCMR", "VMR", "VR")
VERB_BUCKETS = ("1", "2", ">=3")


@dataclass
class GroundTruth:
    video: int  # corpus video index
    span: tuple[int, int]
    sub_event_count: int | None = None


def _hit_in_top_k(
    ranked: list[MomentCandidate], gt: GroundTruth, k: int, iou: float, task: str
) -> bool:
    for cand in ranked[:k]:
        if cand.video != gt.video:
            continue
        if task == "VR":
            return True
        if temporal_iou((cand.start, cand.end), gt.span) >= iou:
            return True
    return False


def recall_at_k(
    ranked_lists: dict[str, list[MomentCandidate]],
    ground_truth: dict[str, GroundTruth],
    k: int,
    iou: float,
    task: str = "VCMR",
) -> float:
    """Fraction of queries with a qualifying tuple in the top k."""
    if task not in TASKS:
        raise SpecInvalid(f"task {task!r} not in {TASKS}")
    if k < 1:
        raise SpecInvalid(f"k must be >= 1, got {k}")
    if not ranked_lists:
        raise EmptyQuerySet("no queries to evaluate")
    hits = 0
    for query_id, ranked in ranked_lists.items():
        if query_id not in ground_truth:
            raise EmptyQuerySet(f"query {query_id} missing ground truth")
        hits += _hit_in_top_k(ranked, ground_truth[query_id], k, iou, task)
    return hits / len(ranked_lists)


def verb_bucket(sub_event_count: int) -> str:
    return "1" if sub_event_count <= 1 else "2" if sub_event_count == 2 else ">=3"


def verb_breakdown(
    ranked_lists: dict[str, list[MomentCandidate]],
    ground_truth: dict[str, GroundTruth],
    k: int,
    iou: float,
    task: str = "VCMR",
) -> dict[str, dict]:
    """Recall per {1, 2, >=3} sub-event bucket with sample counts."""
    groups: dict[str, dict[str, list]] = {b: {} for b in VERB_BUCKETS}
    for query_id in ranked_lists:
        gt = ground_truth.get(query_id)
        if gt is None:
            raise EmptyQuerySet(f"query {query_id} missing ground truth")
        if gt.sub_event_count is None:
            raise MissingAnnotation(f"query {query_id} lacks sub_event_count")
        groups[verb_bucket(gt.sub_event_count)][query_id] = ranked_lists[query_id]
    out = {}
    for bucket, subset in groups.items():
        if subset:
            out[bucket] = {
                "count": len(subset),
                "recall": recall_at_k(subset, ground_truth, k, iou, task),
            }
        else:
            out[bucket] = {"count": 0, "recall": None}
    return out


@dataclass
class MetricsReport:
    """Per (task, K, IoU) recalls, verb buckets, and sample counts."""

    recalls: dict[str, float] = field(default_factory=dict)  # "VCMR/R@1/IoU=0.5" -> value
    verb_buckets: dict[str, dict] = field(default_factory=dict)
    query_count: int = 0

    @staticmethod
    def key(task: str, k: int, iou: float) -> str:
        return f"{task}/R@{k}/IoU={iou:g}" if task != "VR" else f"VR/R@{k}"

    def to_json(self) -> str:
        return json.dumps(
            {
                "query_count": self.query_count,
                "recalls": self.recalls,
                "verb_buckets": self.verb_buckets,
            },
            indent=2,
            sort_keys=True,
        )

    def table(self) -> str:
        lines = [f"{'metric':<24} value", "-" * 32]
        for key in sorted(self.recalls):
            lines.append(f"{key:<24} {self.recalls[key]:.4f}")
        for bucket in VERB_BUCKETS:
            info = self.verb_buckets.get(bucket)
            if info is None:
                continue
            shown = "n/a" if info["recall"] is None else f"{info['recall']:.4f}"
            lines.append(f"verbs {bucket:<17} {shown} (n={info['count']})")
        return "\n".join(lines)


def build_report(
    ranked_by_task: dict[str, dict[str, list[MomentCandidate]]],
    ground_truth: dict[str, GroundTruth],
    k_values,
    iou_thresholds,
    breakdown_task: str = "VCMR",
    breakdown_k: int = 1,
) -> MetricsReport:
    report = MetricsReport(query_count=len(ground_truth))
    for task, lists in ranked_by_task.items():
        for k in k_values:
            if task == "VR":
                report.recalls[MetricsReport.key(task, k, 0.0)] = recall_at_k(
                    lists, ground_truth, k, 0.0, task
                )
            else:
                for iou in iou_thresholds:
                    report.recalls[MetricsReport.key(task, k, iou)] = recall_at_k(
                        lists, ground_truth, k, iou, task
                    )
    if breakdown_task in ranked_by_task:
        report.verb_buckets = verb_breakdown(
            ranked_by_task[breakdown_task],
            ground_truth,
            breakdown_k,
            iou_thresholds[0] if iou_thresholds else 0.5,
            breakdown_task,
        )
    return report
