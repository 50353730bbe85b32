"""Span scoring, IoU, NMS (all against brute-force oracles), and ranking modes."""

import numpy as np
import pytest

from genspan.data import load_manifest
from genspan.errors import SpecInvalid, UnknownVideo
from genspan.model import ModelConfig, init_params
from genspan.retrieval import (
    MomentCandidate,
    RankConfig,
    nms,
    rank_corpus,
    score_spans,
    temporal_iou,
)
from genspan.synth import SynthSpec, generate


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


# --- span scoring ------------------------------------------------------------------

def brute_force_spans(p_s, p_e, r, max_span):
    """O(L^2) double loop with direct slice means."""
    out = {}
    length = len(p_s)
    for s in range(1, length + 1):
        for e in range(s, min(length, s + max_span - 1) + 1):
            out[(s, e)] = _sigmoid(p_s[s - 1]) * _sigmoid(p_e[e - 1]) * np.mean(r[s - 1:e])
    return out


def test_zero_logits_unit_relevance_gives_quarter():
    p = np.zeros(5)
    candidates = score_spans(p, p, np.ones(5), max_span=3)
    assert len(candidates) == 5 + 4 + 3
    for cand in candidates:
        assert abs(cand.score - 0.25) < 1e-12


def test_single_clip_video_has_one_candidate(rng):
    p_s = rng.standard_normal(1)
    p_e = rng.standard_normal(1)
    r = rng.uniform(0, 1, 1)
    candidates = score_spans(p_s, p_e, r, max_span=4)
    assert len(candidates) == 1
    want = _sigmoid(p_s[0]) * _sigmoid(p_e[0]) * r[0]
    assert abs(candidates[0].score - want) < 1e-12
    assert (candidates[0].start, candidates[0].end) == (1, 1)


def test_span_scores_match_brute_force_exactly(rng):
    for seed in range(20):
        gen = np.random.default_rng(seed)
        p_s = gen.standard_normal(6)
        p_e = gen.standard_normal(6)
        r = gen.uniform(0, 1, 6)
        got = {(c.start, c.end): c.score for c in score_spans(p_s, p_e, r, max_span=3)}
        want = brute_force_spans(p_s, p_e, r, 3)
        assert got.keys() == want.keys()
        for key in want:
            assert abs(got[key] - want[key]) < 1e-12


# --- temporal IoU ---------------------------------------------------------------------

def clip_count_iou(a, b):
    """Independent counting-set oracle."""
    sa = set(range(a[0], a[1] + 1))
    sb = set(range(b[0], b[1] + 1))
    return len(sa & sb) / len(sa | sb)


def test_iou_identical_and_disjoint():
    assert temporal_iou((2, 5), (2, 5)) == 1.0
    assert temporal_iou((1, 2), (3, 9)) == 0.0


def test_iou_hand_case():
    # spans (1,4) and (3,6): intersection {3,4}, union {1..6}
    assert abs(temporal_iou((1, 4), (3, 6)) - 2 / 6) < 1e-12


def test_iou_matches_counting_oracle(rng):
    for _ in range(200):
        a = tuple(sorted(rng.integers(1, 20, 2).tolist()))
        b = tuple(sorted(rng.integers(1, 20, 2).tolist()))
        assert abs(temporal_iou(a, b) - clip_count_iou(a, b)) < 1e-12


# --- NMS ----------------------------------------------------------------------------------

def greedy_nms_oracle(candidates, threshold):
    order = sorted(
        range(len(candidates)),
        key=lambda i: (-candidates[i].score, candidates[i].start, candidates[i].end, i),
    )
    kept = []
    for i in order:
        cand = candidates[i]
        if all(clip_count_iou((cand.start, cand.end), (k.start, k.end)) <= threshold for k in kept):
            kept.append(cand)
    return kept


def test_single_candidate_survives():
    cand = MomentCandidate(video=0, start=2, end=4, score=0.5)
    assert nms([cand], 0.5) == [cand]


def test_duplicate_spans_keep_first():
    a = MomentCandidate(video=0, start=2, end=4, score=0.5)
    b = MomentCandidate(video=0, start=2, end=4, score=0.5)
    assert nms([a, b], 0.5) == [a]


def test_nms_matches_greedy_oracle_100_seeds():
    for seed in range(100):
        rng = np.random.default_rng(seed)
        candidates = []
        for _ in range(50):
            s = int(rng.integers(1, 30))
            e = s + int(rng.integers(0, 8))
            candidates.append(MomentCandidate(video=0, start=s, end=e, score=float(rng.uniform())))
        got = nms(candidates, 0.5)
        want = greedy_nms_oracle(candidates, 0.5)
        assert got == want


def test_nms_survivor_invariants(rng):
    candidates = [
        MomentCandidate(video=0, start=int(s), end=int(s) + int(w), score=float(v))
        for s, w, v in zip(rng.integers(1, 20, 40), rng.integers(0, 6, 40), rng.uniform(0, 1, 40))
    ]
    survivors = nms(candidates, 0.4)
    assert all(s in candidates for s in survivors)
    scores = [s.score for s in survivors]
    assert scores == sorted(scores, reverse=True)
    for i, a in enumerate(survivors):
        for b in survivors[i + 1:]:
            assert temporal_iou((a.start, a.end), (b.start, b.end)) <= 0.4


def test_raising_span_relevance_never_hurts_its_score_or_nonoverlap_rank(rng):
    # Monotonicity: lifting r inside a span raises that span's score and can
    # never drop it below any candidate disjoint from the lifted region.
    p_s = rng.standard_normal(8)
    p_e = rng.standard_normal(8)
    r = rng.uniform(0.1, 0.6, 8)
    span = (3, 5)
    before = {(c.start, c.end): c.score for c in score_spans(p_s, p_e, r, 4)}
    lifted = r.copy()
    lifted[span[0] - 1:span[1]] += 0.3
    after = {(c.start, c.end): c.score for c in score_spans(p_s, p_e, lifted, 4)}
    assert after[span] >= before[span]
    disjoint = [k for k in before if k[1] < span[0] or k[0] > span[1]]
    beaten_before = sum(before[span] > before[k] for k in disjoint)
    beaten_after = sum(after[span] > after[k] for k in disjoint)
    assert beaten_after >= beaten_before


# --- corpus ranking -------------------------------------------------------------------------

@pytest.fixture(scope="module")
def ranked_setup(tmp_path_factory):
    spec = SynthSpec(
        seed=31,
        num_videos=5,
        length_range=(18, 24),
        dim=16,
        motifs_per_query=(1, 2),
        prior_length=5,
        motif_pool=8,
        clips_per_motif=(2, 3),
    )
    out = tmp_path_factory.mktemp("rankcorpus")
    generate(spec, out)
    corpus = load_manifest(out / "manifest.json")
    config = ModelConfig(dim=16, state_size=4, num_layers=2, keep_ratio=0.5)
    params = init_params(config, seed=2)
    return corpus, params, config


def test_single_video_corpus_vcmr_equals_vmr(tmp_path, rng):
    spec = SynthSpec(
        seed=32, num_videos=1, length_range=(18, 20), dim=16,
        motifs_per_query=(1, 1), prior_length=4, motif_pool=4, clips_per_motif=(2, 3),
    )
    generate(spec, tmp_path)
    corpus = load_manifest(tmp_path / "manifest.json")
    config = ModelConfig(dim=16, state_size=4, num_layers=1, keep_ratio=0.5)
    params = init_params(config, seed=3)
    rank_cfg = RankConfig()
    query = corpus.queries[0]
    vcmr = rank_corpus(query, corpus, params, config, rank_cfg, mode="VCMR")
    vmr = rank_corpus(query, corpus, params, config, rank_cfg, mode="VMR")
    assert vcmr == vmr


def test_vr_top1_matches_vcmr_top1_without_suppression(ranked_setup):
    corpus, params, config = ranked_setup
    rank_cfg = RankConfig(nms_threshold=1.0)  # IoU can never exceed 1: no suppression
    query = corpus.queries[0]
    vr = rank_corpus(query, corpus, params, config, rank_cfg, mode="VR")
    vcmr = rank_corpus(query, corpus, params, config, rank_cfg, mode="VCMR")
    assert vr[0].video == vcmr[0].video


def test_vr_score_is_pre_nms_max(ranked_setup):
    corpus, params, config = ranked_setup
    from genspan.engine import no_grad
    from genspan.model import forward

    rank_cfg = RankConfig(nms_threshold=0.3)
    query = corpus.queries[1]
    vr = rank_corpus(query, corpus, params, config, rank_cfg, mode="VR")
    for entry in vr:
        video = corpus.videos[entry.video]
        prior = corpus.priors.lookup(query.query_id, video.video_id)
        with no_grad():
            out = forward(
                video.features, corpus.query_vector(query.query_id),
                prior.features.array if prior else None, params, config,
            )
        best = max(c.score for c in score_spans(out.p_s, out.p_e, out.r, rank_cfg.max_span))
        assert abs(entry.score - best) < 1e-12


def test_vmr_unknown_video(ranked_setup):
    corpus, params, config = ranked_setup
    from genspan.data import QuerySample

    ghost = QuerySample(query_id="ghost", text="x", gt_video_id="nope", gt_span=(1, 2), sub_event_count=1)
    with pytest.raises(UnknownVideo):
        rank_corpus(ghost, corpus, params, config, RankConfig(), mode="VMR")


def test_ranking_is_bitwise_reproducible(ranked_setup):
    corpus, params, config = ranked_setup
    query = corpus.queries[2]
    first = rank_corpus(query, corpus, params, config, RankConfig(), mode="VCMR")
    second = rank_corpus(query, corpus, params, config, RankConfig(), mode="VCMR")
    assert first == second


def test_threaded_ranking_matches_serial(ranked_setup):
    corpus, params, config = ranked_setup
    query = corpus.queries[3]
    serial = rank_corpus(query, corpus, params, config, RankConfig(), mode="VCMR", threads=1)
    threaded = rank_corpus(query, corpus, params, config, RankConfig(), mode="VCMR", threads=2)
    assert serial == threaded


def test_global_sort_tiebreak_is_fully_specified():
    # same score: lower video index, then earlier start, then earlier end
    a = MomentCandidate(video=1, start=3, end=4, score=0.5)
    b = MomentCandidate(video=0, start=5, end=6, score=0.5)
    c = MomentCandidate(video=0, start=2, end=9, score=0.5)
    merged = [a, b, c]
    merged.sort(key=lambda x: (-x.score, x.video, x.start, x.end))
    assert merged == [c, b, a]


def test_rank_config_validation():
    with pytest.raises(SpecInvalid):
        RankConfig(max_span=0).validate()
    with pytest.raises(SpecInvalid):
        RankConfig(nms_threshold=0.0).validate()
