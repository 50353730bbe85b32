"""Corpus, query, subtitle, and prior domain types.

Clip indices are 1-based inclusive at every public boundary; feature
payloads are float32 regardless of the engine's numeric mode. Loaded
objects are immutable and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..errors import DanglingReference, DimMismatch, SpanOutOfBounds


class FeatureSequence:
    """An (L, d) float32 per-clip feature matrix for one video or prior."""

    __slots__ = ("array",)

    def __init__(self, array) -> None:
        arr = np.asarray(array, dtype=np.float32)
        if arr.ndim != 2:
            raise DimMismatch(f"feature sequence must be 2-D, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DimMismatch(f"feature sequence dims must be positive, got {arr.shape}")
        if not np.isfinite(arr).all():
            raise DimMismatch("feature sequence contains non-finite values")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        self.array = arr

    @property
    def length(self) -> int:
        return self.array.shape[0]

    @property
    def dim(self) -> int:
        return self.array.shape[1]

    def __eq__(self, other) -> bool:
        return isinstance(other, FeatureSequence) and np.array_equal(self.array, other.array)

    def __repr__(self) -> str:
        return f"FeatureSequence(L={self.length}, d={self.dim})"


@dataclass(frozen=True)
class Subtitle:
    text: str
    start_s: float
    end_s: float
    speaker: str | None = None

    def __post_init__(self) -> None:
        if self.start_s > self.end_s:
            raise SpanOutOfBounds(f"subtitle span {self.start_s}..{self.end_s} inverted")


@dataclass(frozen=True)
class CorpusVideo:
    video_id: str
    features: FeatureSequence
    subtitles: tuple[Subtitle, ...] = ()
    clip_duration_s: float = 1.0

    def __post_init__(self) -> None:
        horizon = self.features.length * self.clip_duration_s
        for sub in self.subtitles:
            if sub.start_s < 0 or sub.end_s > horizon + 1e-9:
                raise SpanOutOfBounds(
                    f"subtitle {sub.start_s}..{sub.end_s}s outside video {self.video_id} "
                    f"(0..{horizon}s)"
                )

    @property
    def length(self) -> int:
        return self.features.length


@dataclass(frozen=True)
class QuerySample:
    query_id: str
    text: str
    gt_video_id: str
    gt_span: tuple[int, int]  # 1-based inclusive clip indices
    sub_event_count: int | None = None

    def __post_init__(self) -> None:
        s, e = self.gt_span
        if not (1 <= s <= e):
            raise SpanOutOfBounds(f"query {self.query_id}: span {self.gt_span} invalid")
        if self.sub_event_count is not None and self.sub_event_count < 1:
            raise SpanOutOfBounds(f"query {self.query_id}: sub_event_count must be >= 1")


class PriorQuality(str, Enum):
    CORRECT = "Correct"
    POSITIVE = "Positive"
    WEAK_POSITIVE = "WeakPositive"
    HALLUCINATION = "Hallucination"


@dataclass(frozen=True)
class GeneratedPrior:
    query_id: str
    video_id: str
    features: FeatureSequence
    quality: PriorQuality
    prompt_text: str


class PriorStore:
    """Priors keyed by (query_id, video_id) with a per-query fallback.

    A query's prior is a motion reference for that query; when no prior
    was built for a specific candidate video, the query-level prior is
    reused (queries-only generation mode).
    """

    def __init__(self, priors=()) -> None:
        self._exact: dict[tuple[str, str], GeneratedPrior] = {}
        self._by_query: dict[str, GeneratedPrior] = {}
        for p in priors:
            self.add(p)

    def add(self, prior: GeneratedPrior) -> None:
        self._exact[(prior.query_id, prior.video_id)] = prior
        self._by_query.setdefault(prior.query_id, prior)

    def lookup(self, query_id: str, video_id: str) -> GeneratedPrior | None:
        exact = self._exact.get((query_id, video_id))
        if exact is not None:
            return exact
        return self._by_query.get(query_id)

    def __len__(self) -> int:
        return len(self._exact)

    def __iter__(self):
        return iter(self._exact.values())


@dataclass
class Corpus:
    """A fully cross-checked corpus: videos, queries, priors, query vectors."""

    dim: int
    videos: tuple[CorpusVideo, ...]
    queries: tuple[QuerySample, ...]
    priors: PriorStore = field(default_factory=PriorStore)
    query_features: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self._index = {v.video_id: i for i, v in enumerate(self.videos)}
        if len(self._index) != len(self.videos):
            raise DanglingReference("duplicate video ids in corpus")
        for q in self.queries:
            if q.gt_video_id not in self._index:
                raise DanglingReference(f"query {q.query_id} references missing video {q.gt_video_id}")
            video = self.videos[self._index[q.gt_video_id]]
            if q.gt_span[1] > video.length:
                raise SpanOutOfBounds(
                    f"query {q.query_id}: span end {q.gt_span[1]} beyond video "
                    f"{q.gt_video_id} length {video.length}"
                )

    def video_index(self, video_id: str) -> int:
        if video_id not in self._index:
            raise DanglingReference(f"unknown video id {video_id}")
        return self._index[video_id]

    def video_by_id(self, video_id: str) -> CorpusVideo:
        return self.videos[self.video_index(video_id)]

    def query_vector(self, query_id: str) -> np.ndarray:
        """Query embedding, or a zero vector when the manifest supplies none."""
        vec = self.query_features.get(query_id)
        if vec is None:
            return np.zeros(self.dim, dtype=np.float32)
        return vec
