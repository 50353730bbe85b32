"""LLM-guided prior construction behind pluggable clients with mocks."""

from .cache import PriorCache
from .clients import (
    Decomposition,
    HttpGeneratorClient,
    HttpScorerClient,
    MockGeneratorClient,
    MockScorerClient,
    PriorGeneratorClient,
    ScorerClient,
    VERB_LEXICON,
    tokenize,
)
from .pipeline import (
    DEFAULT_RELEVANCE_THRESHOLD,
    PROMPT_PREAMBLE,
    RelevanceJudgment,
    TRANSITION_PHRASE,
    build_prior,
    compose_prompt,
    decompose_query,
    match_subtitles,
)

__all__ = [
    "DEFAULT_RELEVANCE_THRESHOLD",
    "Decomposition",
    "HttpGeneratorClient",
    "HttpScorerClient",
    "MockGeneratorClient",
    "MockScorerClient",
    "PROMPT_PREAMBLE",
    "PriorCache",
    "PriorGeneratorClient",
    "RelevanceJudgment",
    "ScorerClient",
    "TRANSITION_PHRASE",
    "VERB_LEXICON",
    "build_prior",
    "compose_prompt",
    "decompose_query",
    "match_subtitles",
    "tokenize",
]
