"""Prior pipeline: decomposition, subtitle matching, prompts, and caching."""

import numpy as np
import pytest

from genspan.data import CorpusVideo, FeatureSequence, PriorQuality, QuerySample, Subtitle
from genspan.errors import CacheCorruption, ClientFailure, EmptyDecomposition, SpecInvalid
from genspan.prior import (
    MockGeneratorClient,
    MockScorerClient,
    PriorCache,
    PROMPT_PREAMBLE,
    TRANSITION_PHRASE,
    build_prior,
    compose_prompt,
    decompose_query,
    match_subtitles,
)


@pytest.fixture
def scorer():
    return MockScorerClient()


# --- decomposition -----------------------------------------------------------

def test_two_verb_query_splits_on_verbs(scorer):
    decomp = decompose_query("walks into the room and hands a coffee", scorer)
    assert decomp.verbs == ("walks", "hands")
    assert decomp.sub_queries == ("walks into the room", "hands a coffee")


def test_single_verb_query_stays_whole(scorer):
    decomp = decompose_query("the red mug on the table", scorer)
    assert decomp.sub_queries == ("the red mug on the table",)


def test_empty_query_rejected(scorer):
    with pytest.raises(EmptyDecomposition):
        decompose_query("   ", scorer)


# --- subtitle matching -------------------------------------------------------

def _subtitle(text, start=0.0, end=1.0):
    return Subtitle(text=text, start_s=start, end_s=end)


def test_identical_strings_score_one(scorer):
    assert scorer.score("red mug kitchen", "red mug kitchen") == 1.0


def test_threshold_filtering_matches_derived_jaccard(scorer):
    # Jaccard derived first: 4/5=0.8, 3/10=0.3, 3/5=0.6 against the query set.
    query = "red mug kitchen table"
    subs = [
        _subtitle("red mug kitchen table shelf", 0, 1),
        _subtitle("red mug kitchen lamp sofa window door floor wall", 1, 2),
        _subtitle("red mug kitchen sink", 2, 3),
    ]
    raw = [scorer.score(query, s.text) for s in subs]
    np.testing.assert_allclose(raw, [0.8, 0.3, 0.6])

    decomp = decompose_query(query, scorer)
    kept, judgments = match_subtitles(decomp, subs, 0.5, scorer)
    assert kept == [subs[0], subs[2]]
    np.testing.assert_allclose([j.aggregated for j in judgments], [0.8, 0.3, 0.6])


def test_zero_threshold_keeps_any_positive(scorer):
    decomp = decompose_query("red mug", scorer)
    kept, _ = match_subtitles(decomp, [_subtitle("a red thing")], 0.0, scorer)
    assert len(kept) == 1


def test_aggregation_is_order_free(scorer):
    from genspan.prior import Decomposition

    subs = [_subtitle("walks into the room slowly")]
    forward = Decomposition(query="q", verbs=(), sub_queries=("walks into the room", "hands a coffee"))
    backward = Decomposition(query="q", verbs=(), sub_queries=("hands a coffee", "walks into the room"))
    _, j1 = match_subtitles(forward, subs, 0.0, scorer)
    _, j2 = match_subtitles(backward, subs, 0.0, scorer)
    assert j1[0].aggregated == j2[0].aggregated


def test_filtering_is_monotone_in_threshold(scorer):
    decomp = decompose_query("red mug kitchen table", scorer)
    subs = [
        _subtitle("red mug kitchen table shelf"),
        _subtitle("red mug kitchen lamp sofa window door floor wall"),
        _subtitle("red mug kitchen sink"),
        _subtitle("nothing shared at all"),
    ]
    grid = [0.0, 0.2, 0.4, 0.6, 0.8]
    kept_sets = []
    for eta in grid:
        kept, _ = match_subtitles(decomp, subs, eta, scorer)
        kept_sets.append({s.text for s in kept})
    for tighter, looser in zip(kept_sets[1:], kept_sets[:-1]):
        assert tighter.issubset(looser)


def test_threshold_domain_checked(scorer):
    decomp = decompose_query("red mug", scorer)
    with pytest.raises(SpecInvalid):
        match_subtitles(decomp, [], 1.0, scorer)


# --- prompt composition --------------------------------------------------------

def test_empty_subtitles_gives_query_only_prompt(scorer):
    prompt = compose_prompt("pours the coffee", [], scorer)
    assert prompt == f"{PROMPT_PREAMBLE} pours the coffee"


def test_prompt_contains_query_and_ordered_subtitles(scorer):
    later = _subtitle("second line", 5, 6)
    earlier = _subtitle("first line", 1, 2)
    prompt = compose_prompt("waves hello", [later, earlier], scorer)
    assert "waves hello" in prompt
    assert TRANSITION_PHRASE in prompt
    assert prompt.index("first line") < prompt.index("second line")


# --- prior building and cache ---------------------------------------------------

class _CountingGenerator(MockGeneratorClient):
    def __init__(self, dim, length=8):
        super().__init__(dim, length)
        self.calls = 0

    def generate(self, prompt):
        self.calls += 1
        return super().generate(prompt)


def _tiny_pair(rng):
    video = CorpusVideo(
        video_id="v0",
        features=FeatureSequence(rng.standard_normal((10, 4)).astype(np.float32)),
        subtitles=(_subtitle("walks into the room", 0, 3),),
    )
    query = QuerySample(
        query_id="q0", text="walks into the room", gt_video_id="v0", gt_span=(2, 5), sub_event_count=1
    )
    return query, video


def test_build_prior_caches_and_replays(tmp_path, rng, scorer):
    query, video = _tiny_pair(rng)
    generator = _CountingGenerator(dim=4)
    cache = PriorCache(tmp_path / "cache")
    first = build_prior(query, video, scorer, generator, cache)
    assert generator.calls == 1
    second = build_prior(query, video, scorer, generator, cache)
    assert generator.calls == 1  # cache hit, no client call
    assert first.features == second.features
    assert first.prompt_text == second.prompt_text


def test_mock_generator_is_deterministic(rng, scorer, tmp_path):
    query, video = _tiny_pair(rng)
    a = build_prior(query, video, scorer, MockGeneratorClient(4), PriorCache(tmp_path / "c1"))
    b = build_prior(query, video, scorer, MockGeneratorClient(4), PriorCache(tmp_path / "c2"))
    assert a.features.array.tobytes() == b.features.array.tobytes()
    assert a.features.length == 8


def test_corrupted_cache_raises_not_regenerates(tmp_path, rng, scorer):
    query, video = _tiny_pair(rng)
    generator = _CountingGenerator(dim=4)
    cache = PriorCache(tmp_path / "cache")
    prior = build_prior(query, video, scorer, generator, cache)
    key = cache.key(query.query_id, video.video_id, prior.prompt_text)
    (cache.root / f"{key}.gsf").write_bytes(b"garbage")
    with pytest.raises(CacheCorruption):
        build_prior(query, video, scorer, generator, cache)
    assert generator.calls == 1


def test_http_scorer_unreachable_is_client_failure():
    from genspan.prior import HttpScorerClient

    client = HttpScorerClient("http://127.0.0.1:9", timeout_s=0.2)
    with pytest.raises(ClientFailure):
        client.score("a", "b")


def test_pipeline_outputs_are_pure(tmp_path, rng, scorer):
    query, video = _tiny_pair(rng)

    def run(root):
        cache = PriorCache(root)
        prior = build_prior(query, video, scorer, MockGeneratorClient(4), cache)
        key = cache.key(query.query_id, video.video_id, prior.prompt_text)
        return (cache.root / f"{key}.gsf").read_bytes(), (cache.root / f"{key}.json").read_bytes()

    assert run(tmp_path / "r1") == run(tmp_path / "r2")
