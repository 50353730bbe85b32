"""On-disk prior cache: one feature file plus a JSON sidecar per key.

Writes go through temp-file + rename, so concurrent writers of the same
key are safe and readers never observe partial entries.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

from ..errors import CacheCorruption, GenSpanError
from ..data.features import read_features, write_features
from ..data.types import GeneratedPrior, PriorQuality


class PriorCache:
    def __init__(self, root) -> None:
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.hits = 0
        self.misses = 0

    @staticmethod
    def key(query_id: str, video_id: str, prompt: str) -> str:
        material = "\x1f".join([query_id, video_id, prompt]).encode("utf-8")
        return hashlib.sha256(material).hexdigest()[:24]

    def _feature_path(self, key: str) -> Path:
        return self.root / f"{key}.gsf"

    def _sidecar_path(self, key: str) -> Path:
        return self.root / f"{key}.json"

    def load(self, key: str) -> GeneratedPrior | None:
        fpath = self._feature_path(key)
        spath = self._sidecar_path(key)
        if not fpath.exists() and not spath.exists():
            self.misses += 1
            return None
        try:
            features = read_features(fpath)
            meta = json.loads(spath.read_text())
            prior = GeneratedPrior(
                query_id=meta["query_id"],
                video_id=meta["video_id"],
                features=features,
                quality=PriorQuality(meta["quality"]),
                prompt_text=meta["prompt_text"],
            )
        except (GenSpanError, OSError, KeyError, ValueError, json.JSONDecodeError) as exc:
            raise CacheCorruption(f"cache entry {key} is unreadable: {exc}") from exc
        self.hits += 1
        return prior

    def store(self, key: str, prior: GeneratedPrior) -> None:
        write_features(self._feature_path(key), prior.features)
        sidecar = {
            "query_id": prior.query_id,
            "video_id": prior.video_id,
            "quality": prior.quality.value,
            "prompt_text": prior.prompt_text,
        }
        spath = self._sidecar_path(key)
        tmp = spath.with_name(spath.name + f".tmp{os.getpid()}")
        tmp.write_text(json.dumps(sidecar, indent=2, sort_keys=True))
        os.replace(tmp, spath)
