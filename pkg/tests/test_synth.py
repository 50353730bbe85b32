"""Synthetic corpus generator: determinism, planted structure, prior grades."""

import hashlib
from pathlib import Path

import numpy as np
import pytest

from genspan.data import PriorQuality, load_manifest
from genspan.errors import SpecInvalid
from genspan.synth import SynthSpec, assign_qualities, generate, oracle_locate, quality_counts


def _tree_digest(root):
    h = hashlib.sha256()
    for path in sorted(Path(root).rglob("*")):
        if path.is_file():
            h.update(path.relative_to(root).as_posix().encode())
            h.update(path.read_bytes())
    return h.hexdigest()


def _small_spec(**overrides):
    base = dict(
        seed=11,
        num_videos=6,
        length_range=(20, 28),
        dim=16,
        motifs_per_query=(1, 3),
        prior_length=5,
        feature_noise=0.05,
        motif_pool=8,
        clips_per_motif=(2, 3),
    )
    base.update(overrides)
    return SynthSpec(**base)


def test_same_seed_is_bitwise_identical(tmp_path):
    a = generate(_small_spec(), tmp_path / "a")
    b = generate(_small_spec(), tmp_path / "b")
    assert _tree_digest(tmp_path / "a") == _tree_digest(tmp_path / "b")
    assert a.manifest_path.name == b.manifest_path.name


def test_generated_corpus_loads_and_matches_bookkeeping(tmp_path):
    result = generate(_small_spec(), tmp_path)
    corpus = load_manifest(result.manifest_path)
    assert len(corpus.videos) == 6
    assert len(corpus.queries) == 6
    for query in corpus.queries:
        plant = result.query_plants[query.query_id]
        assert query.gt_video_id == plant.video_id
        assert query.gt_span == plant.span
        assert query.sub_event_count == len(plant.motif_ids)


def test_zero_noise_correct_prior_equals_gt_rows(tmp_path):
    spec = _small_spec(num_videos=1, motifs_per_query=(1, 1), feature_noise=0.0)
    result = generate(spec, tmp_path)
    corpus = load_manifest(result.manifest_path)
    query = corpus.queries[0]
    prior = corpus.priors.lookup(query.query_id, query.gt_video_id)
    video = corpus.video_by_id(query.gt_video_id)
    s, e = query.gt_span
    gt_rows = video.features.array[s - 1:e]
    # single motif at zero noise: every gt row is the motif vector itself
    for row in prior.features.array:
        assert np.array_equal(row, gt_rows[0])


def test_hallucination_priors_are_orthogonal_to_motifs(tmp_path):
    spec = _small_spec(quality_mix=(0.0, 0.0, 0.0, 1.0))
    result = generate(spec, tmp_path)
    corpus = load_manifest(result.manifest_path)
    for query in corpus.queries:
        prior = corpus.priors.lookup(query.query_id, query.gt_video_id)
        assert prior.quality is PriorQuality.HALLUCINATION
        rows = prior.features.array.astype(np.float64)
        rows = rows / np.linalg.norm(rows, axis=1, keepdims=True)
        cos = np.abs(rows @ result.motifs.astype(np.float64).T)
        assert cos.max() < 0.1


def test_quality_counts_are_exact_not_sampled():
    counts = quality_counts((0.5, 0.25, 0.15, 0.10), 20)
    assert counts[PriorQuality.CORRECT] == 10
    assert counts[PriorQuality.POSITIVE] == 5
    assert counts[PriorQuality.WEAK_POSITIVE] == 3
    assert counts[PriorQuality.HALLUCINATION] == 2
    assert sum(counts.values()) == 20
    assigned = assign_qualities((0.5, 0.25, 0.15, 0.10), 20)
    assert len(assigned) == 20
    for quality, want in counts.items():
        assert assigned.count(quality) == want


def test_quality_mixture_respected_on_disk(tmp_path):
    spec = _small_spec(num_videos=8, quality_mix=(0.5, 0.25, 0.125, 0.125))
    result = generate(spec, tmp_path)
    corpus = load_manifest(result.manifest_path)
    seen = [corpus.priors.lookup(q.query_id, q.gt_video_id).quality for q in corpus.queries]
    assert seen.count(PriorQuality.CORRECT) == 4
    assert seen.count(PriorQuality.POSITIVE) == 2
    assert seen.count(PriorQuality.WEAK_POSITIVE) == 1
    assert seen.count(PriorQuality.HALLUCINATION) == 1


def test_oracle_recovers_all_plants_at_zero_noise(tmp_path):
    spec = _small_spec(num_videos=8, feature_noise=0.0, motifs_per_query=(2, 3), distractors=2)
    result = generate(spec, tmp_path)
    corpus = load_manifest(result.manifest_path)
    for query in corpus.queries:
        plant = result.query_plants[query.query_id]
        located = oracle_locate(corpus, result.motifs, plant.motif_ids)
        assert located is not None
        video_id, span = located
        assert video_id == query.gt_video_id
        assert span == query.gt_span


def test_distractors_share_some_but_not_all_motifs(tmp_path):
    spec = _small_spec(num_videos=8, motifs_per_query=(2, 3), distractors=3)
    result = generate(spec, tmp_path)
    primaries = [p for vid, ps in result.plants.items() if int(vid[3:]) < 5 for p in ps]
    for vid, plants in result.plants.items():
        if int(vid[3:]) < 5:
            continue
        plant = plants[0]
        overlaps = [len(set(plant.motif_ids) & set(p.motif_ids)) for p in primaries]
        assert max(overlaps) >= 1  # shares something with a primary
        assert all(plant.motif_ids != p.motif_ids for p in primaries)  # never an exact copy


def test_multiple_queries_per_video(tmp_path):
    spec = _small_spec(num_videos=4, queries_per_video=2, length_range=(24, 30))
    result = generate(spec, tmp_path)
    corpus = load_manifest(result.manifest_path)
    assert len(corpus.queries) == 8
    by_video = {}
    for query in corpus.queries:
        by_video.setdefault(query.gt_video_id, []).append(query.gt_span)
    for video_id, spans in by_video.items():
        assert len(spans) == 2
        (a, b), (c, d) = sorted(spans)
        assert b < c  # plants never overlap


def test_invalid_specs_rejected():
    with pytest.raises(SpecInvalid):
        SynthSpec(seed=0, quality_mix=(0.5, 0.5, 0.5, 0.0)).validate()
    with pytest.raises(SpecInvalid):
        SynthSpec(seed=0, prior_length=99).validate()
    with pytest.raises(SpecInvalid):
        SynthSpec(seed=0, motif_pool=64, dim=16).validate()
    with pytest.raises(SpecInvalid):
        SynthSpec(seed=0, num_videos=2, distractors=2).validate()
