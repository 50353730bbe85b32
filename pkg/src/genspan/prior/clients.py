"""External-service client interfaces with deterministic in-process mocks.

The scorer abstracts an instruction-following LLM (query decomposition,
subtitle-relevance scoring, narrative fusion); the generator abstracts a
text-to-video model that returns an already-encoded feature sequence.
HTTP variants speak JSON over POST with fields documented per method.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from typing import Protocol, Sequence, runtime_checkable

import numpy as np

from ..errors import ClientFailure, EmptyDecomposition
from ..data.types import FeatureSequence


@dataclass(frozen=True)
class Decomposition:
    """A query split into verb-centered sub-events."""

    query: str
    verbs: tuple[str, ...]
    sub_queries: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.sub_queries) < 1 or any(not s.strip() for s in self.sub_queries):
            raise EmptyDecomposition(f"decomposition of {self.query!r} has empty sub-queries")


@runtime_checkable
class ScorerClient(Protocol):
    def decompose(self, query: str) -> Decomposition: ...

    def score(self, sub_query: str, subtitle: str) -> float: ...

    def fuse(self, query: str, subtitles: Sequence[str]) -> str: ...


@runtime_checkable
class PriorGeneratorClient(Protocol):
    def generate(self, prompt: str) -> FeatureSequence: ...


# Coordinating action verbs the mock splitter recognizes.
VERB_LEXICON = frozenset(
    """
    walk walks walked run runs ran enter enters entered leave leaves left
    open opens opened close closes closed sit sits sat stand stands stood
    hold holds held hand hands handed give gives gave take takes took
    turn turns turned pick picks picked put puts grab grabs grabbed
    approach approaches approached reach reaches reached shake shakes shook
    drop drops dropped pour pours poured drink drinks drank eat eats ate
    look looks looked point points pointed knock knocks knocked wave waves
    hug hugs hugged carry carries carried throw throws threw catch catches
    caught push pushes pushed pull pulls pulled climb climbs climbed jump
    jumps jumped dance dances danced talk talks talked
    """.split()
)

_CONNECTIVES = frozenset({"and", "then", "while", "before", "after", "as"})

_TOKEN_RE = re.compile(r"[a-z0-9]+")


def tokenize(text: str) -> list[str]:
    """Lowercased alphanumeric tokens with punctuation stripped."""
    return _TOKEN_RE.findall(text.lower())


class MockScorerClient:
    """Deterministic scorer: lexicon verb splitting and Jaccard relevance."""

    def __init__(self, lexicon: frozenset[str] = VERB_LEXICON) -> None:
        self.lexicon = lexicon

    def decompose(self, query: str) -> Decomposition:
        tokens = tokenize(query)
        if not tokens:
            raise EmptyDecomposition("cannot decompose an empty query")
        verb_positions = [i for i, tok in enumerate(tokens) if tok in self.lexicon]
        if not verb_positions:
            return Decomposition(query=query, verbs=(), sub_queries=(query,))
        segments = []
        verbs = []
        bounds = verb_positions + [len(tokens)]
        # Tokens before the first verb stay attached to the first segment.
        for k, start in enumerate(verb_positions):
            lo = 0 if k == 0 else start
            hi = bounds[k + 1]
            seg = tokens[lo:hi]
            while seg and seg[-1] in _CONNECTIVES:
                seg = seg[:-1]
            if seg:
                segments.append(" ".join(seg))
                verbs.append(tokens[start])
        return Decomposition(query=query, verbs=tuple(verbs), sub_queries=tuple(segments))

    def score(self, sub_query: str, subtitle: str) -> float:
        a, b = set(tokenize(sub_query)), set(tokenize(subtitle))
        if not a or not b:
            return 0.0
        return len(a & b) / len(a | b)

    def fuse(self, query: str, subtitles: Sequence[str]) -> str:
        return " then ".join(s.strip() for s in subtitles)


class MockGeneratorClient:
    """Prompt-seeded pseudo-random feature sequences, identical across runs."""

    def __init__(self, dim: int, length: int = 8) -> None:
        self.dim = dim
        self.length = length

    def generate(self, prompt: str) -> FeatureSequence:
        digest = hashlib.sha256(prompt.encode("utf-8")).digest()
        seed = int.from_bytes(digest[:8], "little")
        rng = np.random.default_rng(seed)
        raw = rng.standard_normal((self.length, self.dim))
        raw /= np.linalg.norm(raw, axis=1, keepdims=True)
        return FeatureSequence(raw.astype(np.float32))


def _parse_score(raw) -> float:
    """Clamp a decimal service response into [0, 1]; garbage is an error."""
    try:
        value = float(raw)
    except (TypeError, ValueError) as exc:
        raise ClientFailure(f"unparseable relevance score {raw!r}") from exc
    if not np.isfinite(value):
        raise ClientFailure(f"non-finite relevance score {raw!r}")
    return min(1.0, max(0.0, value))


class HttpScorerClient:
    """Scorer backed by a JSON-over-HTTP endpoint.

    POST {base}/decompose   {"query": str} -> {"verbs": [str], "sub_queries": [str]}
    POST {base}/score       {"sub_query": str, "subtitle": str} -> {"score": number}
    POST {base}/fuse        {"query": str, "subtitles": [str]} -> {"text": str}
    """

    def __init__(self, base_url: str, timeout_s: float = 10.0) -> None:
        self.base_url = base_url.rstrip("/")
        self.timeout_s = timeout_s

    def _post(self, route: str, payload: dict) -> dict:
        import requests

        try:
            response = requests.post(f"{self.base_url}/{route}", json=payload, timeout=self.timeout_s)
            response.raise_for_status()
            return response.json()
        except Exception as exc:  # connection, HTTP, or JSON failure
            raise ClientFailure(f"scorer endpoint {route} failed: {exc}") from exc

    def decompose(self, query: str) -> Decomposition:
        if not query.strip():
            raise EmptyDecomposition("cannot decompose an empty query")
        body = self._post("decompose", {"query": query})
        subs = tuple(str(s) for s in body.get("sub_queries", []))
        if not subs:
            raise EmptyDecomposition(f"service returned no sub-queries for {query!r}")
        return Decomposition(query=query, verbs=tuple(str(v) for v in body.get("verbs", [])), sub_queries=subs)

    def score(self, sub_query: str, subtitle: str) -> float:
        body = self._post("score", {"sub_query": sub_query, "subtitle": subtitle})
        return _parse_score(body.get("score"))

    def fuse(self, query: str, subtitles: Sequence[str]) -> str:
        body = self._post("fuse", {"query": query, "subtitles": list(subtitles)})
        text = body.get("text")
        if not isinstance(text, str):
            raise ClientFailure(f"fuse endpoint returned {text!r}")
        return text


class HttpGeneratorClient:
    """Generator backed by a JSON-over-HTTP endpoint.

    POST {base}/generate {"prompt": str} -> {"features": [[float]]}
    """

    def __init__(self, base_url: str, dim: int, timeout_s: float = 60.0) -> None:
        self.base_url = base_url.rstrip("/")
        self.dim = dim
        self.timeout_s = timeout_s

    def generate(self, prompt: str) -> FeatureSequence:
        import requests

        try:
            response = requests.post(
                f"{self.base_url}/generate", json={"prompt": prompt}, timeout=self.timeout_s
            )
            response.raise_for_status()
            rows = response.json()["features"]
        except Exception as exc:
            raise ClientFailure(f"generator endpoint failed: {exc}") from exc
        seq = FeatureSequence(np.asarray(rows, dtype=np.float32))
        if seq.dim != self.dim:
            raise ClientFailure(f"generator returned d={seq.dim}, corpus expects d={self.dim}")
        return seq
