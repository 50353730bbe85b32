"""Recall metrics, relevance-map export, and the scaling benchmark."""

from .bench import BenchReport, BenchRow, attention_forward, fit_loglog_slope, scaling_bench
from .metrics import (
    GroundTruth,
    MetricsReport,
    TASKS,
    VERB_BUCKETS,
    build_report,
    recall_at_k,
    verb_breakdown,
    verb_bucket,
)
from .relevance import HEADER_COMMENT, VARIANTS, export_relevance_map, minmax, relevance_row

__all__ = [
    "BenchReport",
    "BenchRow",
    "GroundTruth",
    "HEADER_COMMENT",
    "MetricsReport",
    "TASKS",
    "VARIANTS",
    "VERB_BUCKETS",
    "attention_forward",
    "build_report",
    "export_relevance_map",
    "fit_loglog_slope",
    "minmax",
    "recall_at_k",
    "relevance_row",
    "scaling_bench",
    "verb_bucket",
    "verb_breakdown",
]
