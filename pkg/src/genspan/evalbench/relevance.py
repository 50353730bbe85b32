"""Temporal relevance-map export.

One CSV row per model variant over the clip timeline. Variants with a
selector export minmax(sigmoid(selector score)) * minmax(relevance),
re-normalized per row; selector-free variants export the normalized
relevance alone. Sigmoid relevance scores (not raw logits) are used and
the choice is recorded in the CSV header comment.
"""

from __future__ import annotations

import numpy as np

from ..errors import SpecInvalid

VARIANTS = ("full", "no-subtitle", "text-only", "no-selector")
_SELECTOR_VARIANTS = {"full", "no-subtitle"}

HEADER_COMMENT = "# values: sigmoid clip relevance (and sigmoid selector scores), row min-max normalized"


def minmax(values: np.ndarray) -> np.ndarray:
    """Scale to [0, 1]; constant rows map to all 0.5."""
    values = np.asarray(values, dtype=np.float64)
    lo, hi = values.min(), values.max()
    if hi == lo:
        return np.full_like(values, 0.5)
    return (values - lo) / (hi - lo)


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.asarray(x, dtype=np.float64)))


def relevance_row(variant: str, relevance: np.ndarray, selector_scores=None) -> np.ndarray:
    if variant not in VARIANTS:
        raise SpecInvalid(f"variant {variant!r} not in {VARIANTS}")
    relevance = np.asarray(relevance, dtype=np.float64)
    if variant in _SELECTOR_VARIANTS:
        if selector_scores is None:
            raise SpecInvalid(f"variant {variant!r} needs selector scores")
        combined = minmax(_sigmoid(selector_scores)) * minmax(relevance)
        return minmax(combined)
    return minmax(relevance)


def export_relevance_map(variant_outputs: dict[str, tuple], path) -> None:
    """variant_outputs: variant -> (relevance array, selector scores or None)."""
    lengths = {np.asarray(rel).shape[0] for rel, _ in variant_outputs.values()}
    if len(lengths) != 1:
        raise SpecInvalid(f"variants disagree on timeline length: {sorted(lengths)}")
    length = lengths.pop()
    lines = [HEADER_COMMENT]
    lines.append(",".join(["variant"] + [f"clip{i}" for i in range(1, length + 1)]))
    for variant in VARIANTS:
        if variant not in variant_outputs:
            continue
        relevance, scores = variant_outputs[variant]
        row = relevance_row(variant, relevance, scores)
        lines.append(",".join([variant] + [f"{v:.6f}" for v in row]))
    with open(path, "w", newline="") as handle:
        handle.write("\n".join(lines) + "\n")
