"""Corpus manifest loading.

The manifest is a JSON document:

{
  "format": "genspan-manifest", "version": 1,
  "d": 32, "clip_duration_s": 1.0,
  "videos": [
    {"video_id": "...", "features": "relative/path.gsf",
     "subtitles": [{"text": "...", "start_s": 0.0, "end_s": 2.0, "speaker": null}]}
  ],
  "queries": [
    {"query_id": "...", "text": "...", "sub_event_count": 2,
     "gt_video_id": "...", "gt_span": [3, 9], "features": "relative/path.gsf"}
  ],
  "priors": [
    {"query_id": "...", "video_id": "...", "features": "relative/path.gsf",
     "quality": "Correct", "prompt_text": "..."}
  ]
}

Feature paths are resolved relative to the manifest location. Loading is
total: every failure raises a typed error naming the offending id.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..errors import DanglingReference, ParseError
from .features import read_features
from .types import Corpus, CorpusVideo, GeneratedPrior, PriorQuality, PriorStore, QuerySample, Subtitle

FORMAT_NAME = "genspan-manifest"


def _require(entry: dict, key: str, context: str):
    if key not in entry:
        raise ParseError(f"{context}: missing field {key!r}")
    return entry[key]


def load_manifest(path) -> Corpus:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise ParseError(f"cannot read manifest {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"manifest {path} is not valid JSON: {exc}") from exc
    if doc.get("format") != FORMAT_NAME:
        raise ParseError(f"manifest {path}: format {doc.get('format')!r} != {FORMAT_NAME!r}")
    if doc.get("version") != 1:
        raise ParseError(f"manifest {path}: unsupported version {doc.get('version')!r}")
    dim = int(_require(doc, "d", "manifest"))
    default_clip_s = float(doc.get("clip_duration_s", 1.0))
    root = path.parent

    videos = []
    for entry in doc.get("videos", []):
        vid = _require(entry, "video_id", "video entry")
        features = read_features(root / _require(entry, "features", f"video {vid}"))
        if features.dim != dim:
            raise ParseError(f"video {vid}: feature dim {features.dim} != corpus d {dim}")
        subtitles = tuple(
            Subtitle(
                text=_require(s, "text", f"subtitle of {vid}"),
                start_s=float(_require(s, "start_s", f"subtitle of {vid}")),
                end_s=float(_require(s, "end_s", f"subtitle of {vid}")),
                speaker=s.get("speaker"),
            )
            for s in entry.get("subtitles", [])
        )
        videos.append(
            CorpusVideo(
                video_id=vid,
                features=features,
                subtitles=subtitles,
                clip_duration_s=float(entry.get("clip_duration_s", default_clip_s)),
            )
        )

    queries = []
    query_features: dict[str, np.ndarray] = {}
    for entry in doc.get("queries", []):
        qid = _require(entry, "query_id", "query entry")
        span = _require(entry, "gt_span", f"query {qid}")
        if not (isinstance(span, (list, tuple)) and len(span) == 2):
            raise ParseError(f"query {qid}: gt_span must be [start, end]")
        if "sub_event_count" not in entry:
            raise ParseError(f"query {qid}: missing field 'sub_event_count'")
        queries.append(
            QuerySample(
                query_id=qid,
                text=_require(entry, "text", f"query {qid}"),
                gt_video_id=_require(entry, "gt_video_id", f"query {qid}"),
                gt_span=(int(span[0]), int(span[1])),
                sub_event_count=int(entry["sub_event_count"]),
            )
        )
        if entry.get("features"):
            seq = read_features(root / entry["features"])
            if seq.dim != dim:
                raise ParseError(f"query {qid}: feature dim {seq.dim} != corpus d {dim}")
            query_features[qid] = seq.array.mean(axis=0).astype(np.float32)

    known_queries = {q.query_id for q in queries}
    priors = PriorStore()
    for entry in doc.get("priors", []):
        qid = _require(entry, "query_id", "prior entry")
        vid = _require(entry, "video_id", f"prior for {qid}")
        if qid not in known_queries:
            raise DanglingReference(f"prior references missing query {qid}")
        if vid not in {v.video_id for v in videos}:
            raise DanglingReference(f"prior for {qid} references missing video {vid}")
        features = read_features(root / _require(entry, "features", f"prior for {qid}"))
        if features.dim != dim:
            raise ParseError(f"prior for {qid}: feature dim {features.dim} != corpus d {dim}")
        try:
            quality = PriorQuality(_require(entry, "quality", f"prior for {qid}"))
        except ValueError as exc:
            raise ParseError(f"prior for {qid}: unknown quality {entry.get('quality')!r}") from exc
        priors.add(
            GeneratedPrior(
                query_id=qid,
                video_id=vid,
                features=features,
                quality=quality,
                prompt_text=entry.get("prompt_text", ""),
            )
        )

    return Corpus(
        dim=dim,
        videos=tuple(videos),
        queries=tuple(queries),
        priors=priors,
        query_features=query_features,
    )


def write_manifest(path, doc: dict) -> None:
    """Serialize a manifest document with stable key order."""
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True))
