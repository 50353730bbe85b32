"""Deterministic synthetic corpora with planted multi-action motifs.

Each primary video carries an ordered sequence of 1..4 motif blocks
(orthonormal direction vectors from a shared pool) planted over random
unit-vector background clips; its query names the motifs in order and
supplies a pooled query vector. Distractor videos reuse permuted or
partial motif sets of earlier queries. Generated priors come in four
quality grades, assigned to queries deterministically by index so small
corpora have exact class counts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import SpecInvalid
from .data.features import write_features
from .data.manifest import FORMAT_NAME, write_manifest
from .data.types import Corpus, FeatureSequence, PriorQuality
from .prior.pipeline import PROMPT_PREAMBLE

QUALITY_ORDER = (
    PriorQuality.CORRECT,
    PriorQuality.POSITIVE,
    PriorQuality.WEAK_POSITIVE,
    PriorQuality.HALLUCINATION,
)


@dataclass
class SynthSpec:
    seed: int
    num_videos: int = 64
    length_range: tuple[int, int] = (32, 64)
    dim: int = 32
    motifs_per_query: tuple[int, int] = (1, 4)
    prior_length: int = 8
    feature_noise: float = 0.05
    quality_mix: tuple[float, float, float, float] = (1.0, 0.0, 0.0, 0.0)
    distractors: int = 0
    motif_pool: int = 12
    clips_per_motif: tuple[int, int] = (2, 4)
    queries_per_video: int = 1

    def validate(self) -> None:
        lo, hi = self.length_range
        m_lo, m_hi = self.motifs_per_query
        c_lo, c_hi = self.clips_per_motif
        if self.num_videos < 1:
            raise SpecInvalid("num_videos must be >= 1")
        if not (1 <= lo <= hi):
            raise SpecInvalid(f"bad length_range {self.length_range}")
        if not (1 <= m_lo <= m_hi <= 4):
            raise SpecInvalid(f"motifs_per_query must stay within 1..4, got {self.motifs_per_query}")
        if not (1 <= c_lo <= c_hi):
            raise SpecInvalid(f"bad clips_per_motif {self.clips_per_motif}")
        if self.prior_length < 1 or self.prior_length > lo:
            raise SpecInvalid(f"prior_length {self.prior_length} must be in 1..min video length {lo}")
        if self.feature_noise < 0:
            raise SpecInvalid("feature_noise must be >= 0")
        if len(self.quality_mix) != 4 or any(p < 0 for p in self.quality_mix):
            raise SpecInvalid("quality_mix needs 4 non-negative probabilities")
        if abs(sum(self.quality_mix) - 1.0) > 1e-9:
            raise SpecInvalid(f"quality_mix sums to {sum(self.quality_mix)}, expected 1")
        if self.distractors >= self.num_videos:
            raise SpecInvalid("distractors must leave at least one primary video")
        if self.motif_pool < m_hi:
            raise SpecInvalid("motif_pool smaller than the largest motif count")
        if self.motif_pool > self.dim:
            raise SpecInvalid(f"cannot fit {self.motif_pool} orthonormal motifs in d={self.dim}")
        if self.queries_per_video < 1:
            raise SpecInvalid("queries_per_video must be >= 1")
        worst = self.queries_per_video * m_hi * c_hi + self.queries_per_video + 1
        if worst > lo:
            raise SpecInvalid("videos too short for the largest possible motif plants")

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "num_videos": self.num_videos,
            "length_range": list(self.length_range),
            "dim": self.dim,
            "motifs_per_query": list(self.motifs_per_query),
            "prior_length": self.prior_length,
            "feature_noise": self.feature_noise,
            "quality_mix": list(self.quality_mix),
            "distractors": self.distractors,
            "motif_pool": self.motif_pool,
            "clips_per_motif": list(self.clips_per_motif),
            "queries_per_video": self.queries_per_video,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "SynthSpec":
        spec = cls(seed=int(doc["seed"]))
        for key in (
            "num_videos", "prior_length", "distractors", "motif_pool", "queries_per_video",
        ):
            if key in doc:
                setattr(spec, key, int(doc[key]))
        if "dim" in doc:
            spec.dim = int(doc["dim"])
        if "feature_noise" in doc:
            spec.feature_noise = float(doc["feature_noise"])
        for key in ("length_range", "motifs_per_query", "clips_per_motif"):
            if key in doc:
                setattr(spec, key, (int(doc[key][0]), int(doc[key][1])))
        if "quality_mix" in doc:
            spec.quality_mix = tuple(float(p) for p in doc["quality_mix"])
        return spec


@dataclass
class PlantedMoment:
    video_id: str
    span: tuple[int, int]  # 1-based inclusive
    motif_ids: tuple[int, ...]
    block_bounds: tuple[tuple[int, int], ...]  # per-motif 1-based spans


@dataclass
class SynthResult:
    spec: SynthSpec
    manifest_path: Path
    motifs: np.ndarray  # (pool, d) orthonormal rows, float32
    plants: dict[str, tuple[PlantedMoment, ...]] = field(default_factory=dict)  # by video_id
    query_plants: dict[str, PlantedMoment] = field(default_factory=dict)  # by query_id
    prior_quality: dict[str, PriorQuality] = field(default_factory=dict)  # by query_id


def _orthonormal_pool(rng: np.random.Generator, dim: int, count: int) -> np.ndarray:
    basis, r = np.linalg.qr(rng.standard_normal((dim, count)))
    basis = basis * np.sign(np.diag(r))  # fix QR sign ambiguity
    return basis.T.copy()


def quality_counts(mix, n: int) -> dict[PriorQuality, int]:
    """Largest-remainder apportionment of n priors over the 4 classes."""
    raw = [p * n for p in mix]
    counts = [int(np.floor(x)) for x in raw]
    remainder = n - sum(counts)
    order = sorted(range(4), key=lambda i: (raw[i] - counts[i], -i), reverse=True)
    for i in order[:remainder]:
        counts[i] += 1
    return {q: c for q, c in zip(QUALITY_ORDER, counts)}


def assign_qualities(mix, n: int) -> list[PriorQuality]:
    """Round-robin assignment by query index with exact per-class counts."""
    remaining = quality_counts(mix, n)
    sequence: list[PriorQuality] = []
    while len(sequence) < n:
        for q in QUALITY_ORDER:
            if remaining[q] > 0 and len(sequence) < n:
                remaining[q] -= 1
                sequence.append(q)
    return sequence


def _plant(
    rng, spec, motif_sets, pool, video_id
) -> tuple[np.ndarray, list[PlantedMoment]]:
    """One video's features with non-overlapping motif sequences planted.

    Each motif set becomes one ordered run of blocks; sequences are
    separated by at least one background clip so runs never merge.
    """
    length = int(rng.integers(spec.length_range[0], spec.length_range[1] + 1))
    blocks_per = [
        [int(rng.integers(spec.clips_per_motif[0], spec.clips_per_motif[1] + 1)) for _ in ids]
        for ids in motif_sets
    ]
    span_lens = [sum(blocks) for blocks in blocks_per]
    mandatory = max(0, len(motif_sets) - 1)  # one-clip gap between plants
    free = length - sum(span_lens) - mandatory
    weights = rng.random(len(motif_sets) + 1)
    alloc = np.floor(weights / weights.sum() * free).astype(int)
    alloc[-1] += free - alloc.sum()

    features = rng.standard_normal((length, spec.dim))
    features /= np.linalg.norm(features, axis=1, keepdims=True)
    plants: list[PlantedMoment] = []
    cursor = 0
    for j, (ids, blocks) in enumerate(zip(motif_sets, blocks_per)):
        cursor += int(alloc[j]) + (1 if j > 0 else 0)
        start = cursor
        bounds = []
        for motif_id, block in zip(ids, blocks):
            noise = spec.feature_noise * rng.standard_normal((block, spec.dim))
            features[cursor:cursor + block] = pool[motif_id] + noise
            bounds.append((cursor + 1, cursor + block))
            cursor += block
        plants.append(
            PlantedMoment(
                video_id=video_id,
                span=(start + 1, cursor),
                motif_ids=tuple(ids),
                block_bounds=tuple(bounds),
            )
        )
    return features.astype(np.float32), plants


def _resample_rows(rows: np.ndarray, target: int) -> np.ndarray:
    """Nearest-index resample along the first axis."""
    src = rows.shape[0]
    idx = np.floor(np.linspace(0, src - 1e-9, target)).astype(int)
    return rows[idx]


def _make_prior(rng, spec, quality, video_rows, plant: PlantedMoment, pool) -> np.ndarray:
    lg = spec.prior_length
    s, e = plant.span
    gt_rows = video_rows[s - 1:e]
    if quality is PriorQuality.CORRECT:
        return _resample_rows(gt_rows, lg) + spec.feature_noise * rng.standard_normal((lg, spec.dim))
    if quality in (PriorQuality.POSITIVE, PriorQuality.WEAK_POSITIVE):
        motif_ids = list(plant.motif_ids)
        if quality is PriorQuality.WEAK_POSITIVE:
            candidates = [k for k in range(pool.shape[0]) if k not in motif_ids]
            motif_ids[len(motif_ids) // 2] = int(rng.choice(candidates))
        background = rng.standard_normal((lg, spec.dim))
        background /= np.linalg.norm(background, axis=1, keepdims=True)
        prior = background
        usable = lg - 2 if lg >= len(motif_ids) + 2 else lg
        offset = (lg - usable) // 2
        edges = np.linspace(0, usable, len(motif_ids) + 1).astype(int)
        for k, motif_id in enumerate(motif_ids):
            lo, hi = offset + edges[k], offset + edges[k + 1]
            if hi <= lo:
                hi = lo + 1
            prior[lo:hi] = pool[motif_id] + spec.feature_noise * rng.standard_normal((hi - lo, spec.dim))
        return prior
    # Hallucination: random rows orthogonalized against every motif direction.
    raw = rng.standard_normal((lg, spec.dim))
    raw -= (raw @ pool.T) @ pool
    raw /= np.linalg.norm(raw, axis=1, keepdims=True)
    return raw


def generate(spec: SynthSpec, out_dir) -> SynthResult:
    """Materialize a corpus (manifest + feature files + priors) on disk."""
    spec.validate()
    out = Path(out_dir)
    (out / "features").mkdir(parents=True, exist_ok=True)
    (out / "queries").mkdir(exist_ok=True)
    (out / "priors").mkdir(exist_ok=True)

    root_ss = np.random.SeedSequence(spec.seed)
    pool_ss, video_ss, prior_ss = root_ss.spawn(3)
    pool_rng = np.random.default_rng(pool_ss)
    motifs = _orthonormal_pool(pool_rng, spec.dim, spec.motif_pool).astype(np.float64)

    num_primary = spec.num_videos - spec.distractors
    video_children = video_ss.spawn(spec.num_videos)
    prior_children = prior_ss.spawn(num_primary * spec.queries_per_video)

    video_entries = []
    query_entries = []
    prior_entries = []
    result = SynthResult(spec=spec, manifest_path=out / "manifest.json", motifs=motifs.astype(np.float32))

    query_plants: list[PlantedMoment] = []
    video_rows: dict[str, np.ndarray] = {}
    for i in range(num_primary):
        rng = np.random.default_rng(video_children[i])
        motif_sets = []
        for _ in range(spec.queries_per_video):
            m = int(rng.integers(spec.motifs_per_query[0], spec.motifs_per_query[1] + 1))
            motif_sets.append(tuple(int(x) for x in rng.choice(spec.motif_pool, size=m, replace=False)))
        video_id = f"vid{i:04d}"
        rows, plants = _plant(rng, spec, motif_sets, motifs, video_id)
        query_plants.extend(plants)
        video_rows[video_id] = rows
        result.plants[video_id] = tuple(plants)
        write_features(out / "features" / f"{video_id}.gsf", FeatureSequence(rows))
        subtitles = [
            {
                "text": "someone does " + " then ".join(f"motif{mid:02d}" for mid in plant.motif_ids),
                "start_s": float(plant.span[0] - 1),
                "end_s": float(plant.span[1]),
            }
            for plant in plants
        ]
        subtitles.append({"text": "idle background chatter", "start_s": 0.0, "end_s": 1.0})
        video_entries.append(
            {
                "video_id": video_id,
                "features": f"features/{video_id}.gsf",
                "subtitles": subtitles,
            }
        )

    shareable = [p for p in query_plants if len(p.motif_ids) >= 2]
    for k in range(spec.distractors):
        rng = np.random.default_rng(video_children[num_primary + k])
        base = shareable[k % len(shareable)] if shareable else query_plants[k % len(query_plants)]
        ids = list(base.motif_ids)
        if len(ids) >= 2:
            if rng.random() < 0.5 or len(ids) == 2:
                ids = ids[1:] + ids[:1]  # rotated order: same motifs, wrong order
            else:
                drop = int(rng.integers(0, len(ids)))
                ids = [x for j, x in enumerate(ids) if j != drop]  # partial set
        else:
            others = [x for x in range(spec.motif_pool) if x not in ids]
            ids = [int(rng.choice(others))]
        video_id = f"vid{num_primary + k:04d}"
        rows, plants = _plant(rng, spec, [tuple(ids)], motifs, video_id)
        result.plants[video_id] = tuple(plants)
        video_rows[video_id] = rows
        write_features(out / "features" / f"{video_id}.gsf", FeatureSequence(rows))
        video_entries.append(
            {
                "video_id": video_id,
                "features": f"features/{video_id}.gsf",
                "subtitles": [{"text": "idle background chatter", "start_s": 0.0, "end_s": 1.0}],
            }
        )

    qualities = assign_qualities(spec.quality_mix, len(query_plants))
    for i, plant in enumerate(query_plants):
        rng = np.random.default_rng(prior_children[i])
        query_id = f"qry{i:04d}"
        motif_text = " then ".join(f"motif{mid:02d}" for mid in plant.motif_ids)
        query_vec = motifs[list(plant.motif_ids)].mean(axis=0)
        query_vec = query_vec / np.linalg.norm(query_vec)
        write_features(out / "queries" / f"{query_id}.gsf", FeatureSequence(query_vec[None, :].astype(np.float32)))
        query_entries.append(
            {
                "query_id": query_id,
                "text": motif_text,
                "sub_event_count": len(plant.motif_ids),
                "gt_video_id": plant.video_id,
                "gt_span": [plant.span[0], plant.span[1]],
                "features": f"queries/{query_id}.gsf",
            }
        )
        quality = qualities[i]
        result.prior_quality[query_id] = quality
        result.query_plants[query_id] = plant
        prior_rows = _make_prior(rng, spec, quality, video_rows[plant.video_id], plant, motifs)
        write_features(out / "priors" / f"{query_id}.gsf", FeatureSequence(prior_rows.astype(np.float32)))
        prior_entries.append(
            {
                "query_id": query_id,
                "video_id": plant.video_id,
                "features": f"priors/{query_id}.gsf",
                "quality": quality.value,
                "prompt_text": f"{PROMPT_PREAMBLE} {motif_text}",
            }
        )

    write_manifest(
        result.manifest_path,
        {
            "format": FORMAT_NAME,
            "version": 1,
            "d": spec.dim,
            "clip_duration_s": 1.0,
            "generator": spec.to_dict(),
            "videos": video_entries,
            "queries": query_entries,
            "priors": prior_entries,
        },
    )
    return result


def oracle_locate(corpus: Corpus, motifs: np.ndarray, motif_ids) -> tuple[str, tuple[int, int]] | None:
    """Nearest-motif matcher: find the ordered motif-block sequence in a corpus.

    Labels each clip with its best-matching motif (or background when the
    cosine is below 0.5), compresses consecutive runs, and returns the
    first video whose run sequence contains the requested ids in order.
    """
    wanted = list(motif_ids)
    for video in corpus.videos:
        rows = video.features.array.astype(np.float64)
        norms = np.linalg.norm(rows, axis=1, keepdims=True)
        cos = (rows / np.where(norms > 0, norms, 1.0)) @ motifs.astype(np.float64).T
        labels = np.where(cos.max(axis=1) >= 0.5, cos.argmax(axis=1), -1)
        runs = []
        for t, label in enumerate(labels):
            if runs and runs[-1][0] == label:
                runs[-1][2] = t
            else:
                runs.append([int(label), t, t])
        motif_runs = [r for r in runs if r[0] != -1]
        for k in range(len(motif_runs) - len(wanted) + 1):
            window = motif_runs[k:k + len(wanted)]
            if [r[0] for r in window] == wanted:
                contiguous = all(
                    window[j + 1][1] == window[j][2] + 1 for j in range(len(window) - 1)
                )
                if contiguous:
                    return video.video_id, (window[0][1] + 1, window[-1][2] + 1)
    return None
