"""Recall metrics, verb buckets, and the relevance-map export."""

import numpy as np
import pytest

from genspan.errors import EmptyQuerySet, MissingAnnotation, SpecInvalid
from genspan.evalbench import (
    GroundTruth,
    build_report,
    export_relevance_map,
    minmax,
    recall_at_k,
    relevance_row,
    verb_breakdown,
)
from genspan.retrieval import MomentCandidate


def _cand(video, start, end, score):
    return MomentCandidate(video=video, start=start, end=end, score=score)


def _list_with_hit_at(rank, gt, total=12):
    """Ranked list whose only qualifying tuple sits at the given rank (1-based)."""
    out = []
    for i in range(1, total + 1):
        if i == rank:
            out.append(_cand(gt.video, gt.span[0], gt.span[1], 1.0 - i * 0.01))
        else:
            out.append(_cand(gt.video + 1, 1, 2, 1.0 - i * 0.01))
    return out


def test_rank_one_hit_gives_full_recall():
    gt = {"q": GroundTruth(video=0, span=(3, 6))}
    lists = {"q": _list_with_hit_at(1, gt["q"])}
    assert recall_at_k(lists, gt, 1, 0.5, "VCMR") == 1.0


def test_large_k_equals_hit_anywhere():
    gt = {"q": GroundTruth(video=0, span=(3, 6))}
    lists = {"q": _list_with_hit_at(9, gt["q"])}
    assert recall_at_k(lists, gt, 100, 0.5, "VCMR") == 1.0
    assert recall_at_k(lists, gt, 8, 0.5, "VCMR") == 0.0


def test_hand_enumerated_three_query_fixture():
    # hits at ranks 1, 4, and never: R@1 = 1/3, R@10 = 2/3
    gt = {
        "a": GroundTruth(video=0, span=(2, 5)),
        "b": GroundTruth(video=1, span=(4, 7)),
        "c": GroundTruth(video=2, span=(1, 3)),
    }
    lists = {
        "a": _list_with_hit_at(1, gt["a"]),
        "b": _list_with_hit_at(4, gt["b"]),
        "c": [_cand(5, 1, 2, 0.9)] * 10,
    }
    assert abs(recall_at_k(lists, gt, 1, 0.5, "VCMR") - 1 / 3) < 1e-12
    assert abs(recall_at_k(lists, gt, 10, 0.5, "VCMR") - 2 / 3) < 1e-12


def test_recall_monotone_in_k_and_antitone_in_iou(rng):
    gt = {}
    lists = {}
    for i in range(8):
        gt[f"q{i}"] = GroundTruth(video=i, span=(3, 8))
        hit_rank = int(rng.integers(1, 10))
        near_span = (3, 6) if i % 2 else (3, 8)  # some partial-overlap hits
        entries = []
        for j in range(1, 11):
            if j == hit_rank:
                entries.append(_cand(i, near_span[0], near_span[1], 1 - j * 0.01))
            else:
                entries.append(_cand(99, 1, 2, 1 - j * 0.01))
        lists[f"q{i}"] = entries
    previous = 0.0
    for k in (1, 2, 5, 10):
        value = recall_at_k(lists, gt, k, 0.5, "VCMR")
        assert value >= previous
        previous = value
    for low, high in [(0.3, 0.5), (0.5, 0.7), (0.7, 0.9)]:
        assert recall_at_k(lists, gt, 10, high, "VCMR") <= recall_at_k(lists, gt, 10, low, "VCMR")


def test_vr_ignores_spans():
    gt = {"q": GroundTruth(video=3, span=(5, 9))}
    lists = {"q": [_cand(3, 1, 1, 0.9)]}
    assert recall_at_k(lists, gt, 1, 0.99, "VR") == 1.0
    assert recall_at_k(lists, gt, 1, 0.99, "VCMR") == 0.0


def test_empty_query_set_rejected():
    with pytest.raises(EmptyQuerySet):
        recall_at_k({}, {}, 1, 0.5, "VCMR")


def test_verb_breakdown_buckets():
    gt = {
        "a": GroundTruth(video=0, span=(1, 2), sub_event_count=1),
        "b": GroundTruth(video=1, span=(1, 2), sub_event_count=2),
        "c": GroundTruth(video=2, span=(1, 2), sub_event_count=3),
        "d": GroundTruth(video=3, span=(1, 2), sub_event_count=4),
    }
    lists = {q: _list_with_hit_at(1, gt[q]) for q in gt}
    buckets = verb_breakdown(lists, gt, 1, 0.5, "VCMR")
    assert buckets["1"]["count"] == 1
    assert buckets["2"]["count"] == 1
    assert buckets[">=3"]["count"] == 2
    assert buckets[">=3"]["recall"] == 1.0


def test_verb_breakdown_all_single_verb():
    gt = {"a": GroundTruth(video=0, span=(1, 2), sub_event_count=1)}
    lists = {"a": _list_with_hit_at(1, gt["a"])}
    buckets = verb_breakdown(lists, gt, 1, 0.5, "VCMR")
    assert buckets["2"] == {"count": 0, "recall": None}
    assert buckets[">=3"] == {"count": 0, "recall": None}


def test_verb_breakdown_requires_annotation():
    gt = {"a": GroundTruth(video=0, span=(1, 2), sub_event_count=None)}
    lists = {"a": _list_with_hit_at(1, gt["a"])}
    with pytest.raises(MissingAnnotation):
        verb_breakdown(lists, gt, 1, 0.5, "VCMR")


def test_build_report_keys_and_json():
    gt = {"a": GroundTruth(video=0, span=(2, 5), sub_event_count=2)}
    lists = {"a": _list_with_hit_at(1, gt["a"])}
    report = build_report({"VCMR": lists, "VR": lists}, gt, (1, 10), (0.5, 0.7))
    assert report.recalls["VCMR/R@1/IoU=0.5"] == 1.0
    assert report.recalls["VR/R@10"] == 1.0
    assert "verb" not in report.to_json() or report.verb_buckets
    assert "VCMR/R@1/IoU=0.5" in report.table()


# --- relevance map ----------------------------------------------------------------

def test_minmax_constant_row_is_half():
    np.testing.assert_array_equal(minmax(np.ones(5)), np.full(5, 0.5))


def test_relevance_rows_stay_in_unit_interval(rng):
    rel = rng.uniform(0, 1, 12)
    scores = rng.standard_normal(12)
    for variant in ("full", "no-subtitle"):
        row = relevance_row(variant, rel, scores)
        assert row.min() >= 0.0 and row.max() <= 1.0
    for variant in ("text-only", "no-selector"):
        row = relevance_row(variant, rel)
        assert row.min() >= 0.0 and row.max() <= 1.0


def test_relevance_row_matches_manual_recomputation():
    # 6-clip case recomputed by hand formulas
    rel = np.array([0.2, 0.4, 0.9, 0.6, 0.2, 0.1])
    scores = np.array([-1.0, 0.0, 2.0, 1.0, -2.0, -1.5])
    sig = 1 / (1 + np.exp(-scores))
    a = (sig - sig.min()) / (sig.max() - sig.min())
    b = (rel - rel.min()) / (rel.max() - rel.min())
    combined = a * b
    want = (combined - combined.min()) / (combined.max() - combined.min())
    got = relevance_row("full", rel, scores)
    np.testing.assert_allclose(got, want, atol=1e-12)
    np.testing.assert_allclose(relevance_row("text-only", rel), b, atol=1e-12)


def test_export_writes_header_and_rows(tmp_path, rng):
    rel = rng.uniform(0, 1, 6)
    scores = rng.standard_normal(6)
    path = tmp_path / "map.csv"
    export_relevance_map(
        {
            "full": (rel, scores),
            "no-subtitle": (rel, scores),
            "text-only": (rel, None),
            "no-selector": (rel, None),
        },
        path,
    )
    lines = path.read_text().splitlines()
    assert lines[0].startswith("#") and "sigmoid" in lines[0]
    assert lines[1].split(",")[:2] == ["variant", "clip1"]
    assert len(lines) == 2 + 4
    for line in lines[2:]:
        values = [float(v) for v in line.split(",")[1:]]
        assert all(0.0 <= v <= 1.0 for v in values)


def test_relevance_variant_validation(rng):
    with pytest.raises(SpecInvalid):
        relevance_row("bogus", rng.uniform(0, 1, 4))
    with pytest.raises(SpecInvalid):
        relevance_row("full", rng.uniform(0, 1, 4), None)
