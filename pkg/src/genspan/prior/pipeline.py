"""Query decomposition, subtitle matching, prompt composition, prior caching.

With mock clients the whole pipeline is a pure function of its inputs:
identical queries, subtitles, and thresholds produce byte-identical
prompts and cached priors.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..errors import ClientFailure, EmptyDecomposition, GenSpanError, SpecInvalid
from ..data.types import CorpusVideo, GeneratedPrior, PriorQuality, QuerySample, Subtitle
from .cache import PriorCache
from .clients import Decomposition, PriorGeneratorClient, ScorerClient, _parse_score

# Structured generation preamble: roles, ordered steps, grounded dialogue
# evidence, and explicitly uncertain visual details.
PROMPT_PREAMBLE = (
    "Generate a short clip of the following event. Identify the people "
    "involved and their roles, act out each action step in the order "
    "written, keep the motion continuous between steps, and treat scene "
    "details not stated below as uncertain visual priors rather than "
    "inventing specifics. Event:"
)

TRANSITION_PHRASE = "as described in dialogue:"

DEFAULT_RELEVANCE_THRESHOLD = 0.5


@dataclass(frozen=True)
class RelevanceJudgment:
    """Audit record for one subtitle's relevance scoring."""

    subtitle_index: int
    raw_scores: tuple[float, ...]
    aggregated: float
    rationale: str | None = None


def decompose_query(query: str, client: ScorerClient) -> Decomposition:
    if not query.strip():
        raise EmptyDecomposition("cannot decompose an empty query")
    try:
        decomp = client.decompose(query)
    except GenSpanError:
        raise
    except Exception as exc:
        raise ClientFailure(f"decompose failed: {exc}") from exc
    if len(decomp.sub_queries) < 1:
        raise EmptyDecomposition(f"no sub-queries produced for {query!r}")
    return decomp


def match_subtitles(
    decomp: Decomposition,
    subtitles: Sequence[Subtitle],
    threshold: float,
    client: ScorerClient,
) -> tuple[list[Subtitle], list[RelevanceJudgment]]:
    """Keep subtitles whose aggregated relevance exceeds the threshold.

    Aggregation is max over sub-queries of the clamped score, so the
    result is independent of sub-query order. Original subtitle order is
    preserved.
    """
    if not (0.0 <= threshold < 1.0):
        raise SpecInvalid(f"relevance threshold {threshold} outside [0, 1)")
    kept: list[Subtitle] = []
    judgments: list[RelevanceJudgment] = []
    for j, subtitle in enumerate(subtitles):
        raw: list[float] = []
        for sub_query in decomp.sub_queries:
            try:
                raw.append(_parse_score(client.score(sub_query, subtitle.text)))
            except GenSpanError:
                raise
            except Exception as exc:
                raise ClientFailure(f"score failed for subtitle {j}: {exc}") from exc
        aggregated = max(raw) if raw else 0.0
        judgments.append(RelevanceJudgment(subtitle_index=j, raw_scores=tuple(raw), aggregated=aggregated))
        if aggregated > threshold:
            kept.append(subtitle)
    return kept, judgments


def compose_prompt(query: str, kept_subtitles: Sequence[Subtitle], client: ScorerClient) -> str:
    """Preamble + query, extended with the fused dialogue narrative if any."""
    prompt = f"{PROMPT_PREAMBLE} {query}"
    if not kept_subtitles:
        return prompt
    ordered = sorted(kept_subtitles, key=lambda s: (s.start_s, s.end_s))
    try:
        narrative = client.fuse(query, [s.text for s in ordered])
    except GenSpanError:
        raise
    except Exception as exc:
        raise ClientFailure(f"fuse failed: {exc}") from exc
    return f"{prompt} {TRANSITION_PHRASE} {narrative}"


def build_prior(
    query: QuerySample,
    video: CorpusVideo,
    scorer: ScorerClient,
    generator: PriorGeneratorClient,
    cache: PriorCache,
    threshold: float = DEFAULT_RELEVANCE_THRESHOLD,
    quality: PriorQuality = PriorQuality.CORRECT,
) -> GeneratedPrior:
    """Full pipeline for one (query, candidate video) pair, cache-first."""
    decomp = decompose_query(query.text, scorer)
    kept, _ = match_subtitles(decomp, video.subtitles, threshold, scorer)
    prompt = compose_prompt(query.text, kept, scorer)
    key = cache.key(query.query_id, video.video_id, prompt)
    cached = cache.load(key)
    if cached is not None:
        return cached
    try:
        features = generator.generate(prompt)
    except GenSpanError:
        raise
    except Exception as exc:
        raise ClientFailure(f"generator failed: {exc}") from exc
    prior = GeneratedPrior(
        query_id=query.query_id,
        video_id=video.video_id,
        features=features,
        quality=quality,
        prompt_text=prompt,
    )
    cache.store(key, prior)
    return prior
