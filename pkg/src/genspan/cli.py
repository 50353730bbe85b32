"""Command-line surface: synth, prior, train, eval, rank, bench, export-relevance.

Every command resolves its configuration (defaults <- config file <- flags),
writes the resolved snapshot into the output directory for reproducibility,
and maps error families to stable exit codes. Inputs are never mutated;
artifacts land only under --out and the cache root (GENSPAN_CACHE wins).
"""

from __future__ import annotations

import argparse
import copy
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import errors
from .engine import no_grad, set_mode
from .data import load_checkpoint, load_into, load_manifest
from .data.types import Corpus
from .evalbench import GroundTruth, build_report, export_relevance_map, scaling_bench
from .model import ModelConfig, forward, init_params
from .prior import (
    HttpGeneratorClient,
    HttpScorerClient,
    MockGeneratorClient,
    MockScorerClient,
    PriorCache,
    build_prior,
    compose_prompt,
)
from .retrieval import MomentCandidate, RankConfig, rank_corpus, write_ranking_csv
from .synth import SynthSpec, generate
from .training import LossConfig, TrainConfig, train

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_CLIENT = 4
EXIT_INTERNAL = 5

_CONFIG_ERRORS = (errors.ParseError, errors.SpecInvalid)
_DATA_ERRORS = (
    errors.BadMagic,
    errors.VersionUnsupported,
    errors.TruncatedPayload,
    errors.IoFailure,
    errors.DanglingReference,
    errors.SpanOutOfBounds,
    errors.NameMismatch,
    errors.DimMismatch,
    errors.UnknownVideo,
    errors.EmptyQuerySet,
    errors.MissingAnnotation,
)
_CLIENT_ERRORS = (errors.ClientFailure, errors.EmptyDecomposition, errors.CacheCorruption)


def default_config() -> dict:
    return {
        "seed": 0,
        "threads": 1,
        "cache_root": None,
        "clients": {
            "kind": "mock",
            "scorer_url": None,
            "generator_url": None,
            "prior_length": 8,
            "relevance_threshold": 0.5,
        },
        "model": ModelConfig().to_dict(),
        "loss": LossConfig().to_dict(),
        "rank": RankConfig().to_dict(),
        "train": {
            "epochs": 20,
            "batch_size": 8,
            "lr": 1e-4,
            "weight_decay": 0.01,
            "train_queries": None,
        },
        "synth": SynthSpec(seed=0).to_dict(),
        "bench": {"lengths": [256, 512, 1024, 2048], "repeats": 5},
    }


def _deep_merge(base: dict, overlay: dict) -> dict:
    merged = copy.deepcopy(base)
    for key, value in overlay.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def resolve_config(args: argparse.Namespace) -> dict:
    config = default_config()
    if args.config:
        try:
            user = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise errors.ParseError(f"cannot read config {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise errors.ParseError(f"config {args.config} is not valid JSON: {exc}") from exc
        config = _deep_merge(config, user)
    if args.seed is not None:
        config["seed"] = args.seed
        config["synth"]["seed"] = args.seed
    if args.threads is not None:
        config["threads"] = args.threads
    env_cache = os.environ.get("GENSPAN_CACHE")
    if env_cache:
        config["cache_root"] = env_cache
    return config


def _snapshot(config: dict, out_dir: Path, command: str) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    snapshot = dict(config)
    snapshot["command"] = command
    (out_dir / "resolved_config.json").write_text(json.dumps(snapshot, indent=2, sort_keys=True))


def _clients(config: dict, dim: int):
    section = config["clients"]
    if section["kind"] == "mock":
        return MockScorerClient(), MockGeneratorClient(dim, int(section["prior_length"]))
    if section["kind"] == "http":
        if not section.get("scorer_url") or not section.get("generator_url"):
            raise errors.SpecInvalid("http clients need scorer_url and generator_url")
        return (
            HttpScorerClient(section["scorer_url"]),
            HttpGeneratorClient(section["generator_url"], dim),
        )
    raise errors.SpecInvalid(f"unknown client kind {section['kind']!r}")


def _cache_root(config: dict, out_dir: Path) -> Path:
    return Path(config["cache_root"]) if config["cache_root"] else out_dir / "cache"


def _load_params(checkpoint_path, model_config: ModelConfig):
    checkpoint = load_checkpoint(checkpoint_path)
    if checkpoint.config:
        model_config = ModelConfig.from_dict({**model_config.to_dict(), **checkpoint.config})
    params = init_params(model_config, seed=0)
    load_into(checkpoint, params)
    return params, model_config, checkpoint


def _ground_truth(corpus: Corpus) -> dict[str, GroundTruth]:
    return {
        q.query_id: GroundTruth(
            video=corpus.video_index(q.gt_video_id),
            span=q.gt_span,
            sub_event_count=q.sub_event_count,
        )
        for q in corpus.queries
    }


# --- commands -------------------------------------------------------------------

def cmd_synth(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    out_dir = Path(args.out)
    _snapshot(config, out_dir, "synth")
    spec = SynthSpec.from_dict(config["synth"])
    result = generate(spec, out_dir / "corpus")
    corpus = load_manifest(result.manifest_path)
    qualities: dict[str, int] = {}
    for prior in corpus.priors:
        qualities[prior.quality.value] = qualities.get(prior.quality.value, 0) + 1
    feature_files = len(list((out_dir / "corpus" / "features").glob("*.gsf")))
    print(
        f"synth: {len(corpus.videos)} videos ({feature_files} feature files), "
        f"{len(corpus.queries)} queries, {len(corpus.priors)} priors {qualities}"
    )
    print(f"manifest: {result.manifest_path}")
    return EXIT_OK


def cmd_prior(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    out_dir = Path(args.out)
    _snapshot(config, out_dir, "prior")
    corpus = load_manifest(args.manifest)
    scorer, generator = _clients(config, corpus.dim)
    cache = PriorCache(_cache_root(config, out_dir))
    prompts_dir = out_dir / "prompts"
    prompts_dir.mkdir(parents=True, exist_ok=True)
    threshold = float(config["clients"]["relevance_threshold"])
    generated = cached = 0
    for query in corpus.queries:
        video = corpus.video_by_id(query.gt_video_id)
        before = cache.hits
        prior = build_prior(query, video, scorer, generator, cache, threshold)
        if cache.hits > before:
            cached += 1
        else:
            generated += 1
        (prompts_dir / f"{query.query_id}.txt").write_text(prior.prompt_text)
    print(f"prior: {generated} generated, {cached} cached")
    return EXIT_OK


def _train_config(config: dict) -> TrainConfig:
    section = config["train"]
    return TrainConfig(
        model=ModelConfig.from_dict(config["model"]),
        loss=LossConfig.from_dict(config["loss"]),
        epochs=int(section["epochs"]),
        batch_size=int(section["batch_size"]),
        lr=float(section["lr"]),
        weight_decay=float(section["weight_decay"]),
        seed=int(config["seed"]),
    )


def cmd_train(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    if args.epochs is not None:
        config["train"]["epochs"] = args.epochs
    out_dir = Path(args.out)
    _snapshot(config, out_dir, "train")
    set_mode("fast")
    corpus = load_manifest(args.manifest)
    cfg = _train_config(config)
    limit = config["train"]["train_queries"]
    if limit:
        cfg.query_ids = tuple(sorted(q.query_id for q in corpus.queries)[: int(limit)])
    result = train(corpus, cfg, out_dir=out_dir)
    final = result.checkpoint_paths[-1]
    print(f"train: {cfg.epochs} epochs, {result.final_step} steps")
    if result.trace:
        print(f"final loss: {result.trace[-1].total:.6f}")
    print(f"checkpoint: {final}")
    return EXIT_OK


def _rank_all(
    corpus: Corpus,
    params,
    model_config: ModelConfig,
    rank_config: RankConfig,
    mode: str,
    threads: int,
) -> dict[str, list[MomentCandidate]]:
    return {
        q.query_id: rank_corpus(q, corpus, params, model_config, rank_config, mode, threads)
        for q in sorted(corpus.queries, key=lambda s: s.query_id)
    }


def cmd_rank(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    out_dir = Path(args.out)
    _snapshot(config, out_dir, "rank")
    set_mode("fast")
    corpus = load_manifest(args.manifest)
    rank_config = RankConfig.from_dict(config["rank"])
    params, model_config, _ = _load_params(args.checkpoint, ModelConfig.from_dict(config["model"]))
    mode = args.mode
    ranked = _rank_all(corpus, params, model_config, rank_config, mode, int(config["threads"]))
    rows = []
    for query_id, candidates in ranked.items():
        for cand in candidates[: rank_config.export_top]:
            rows.append((query_id, corpus.videos[cand.video].video_id, cand))
    csv_path = out_dir / f"rankings_{mode.lower()}.csv"
    write_ranking_csv(csv_path, rows)
    for query_id, candidates in ranked.items():
        if candidates:
            top = candidates[0]
            video_id = corpus.videos[top.video].video_id
            print(f"{query_id}: top1 {video_id} [{top.start}, {top.end}] psi={top.score:.6f}")
    print(f"rankings: {csv_path}")
    return EXIT_OK


def _read_rankings(path, corpus: Corpus) -> dict[str, list[MomentCandidate]]:
    ranked: dict[str, list[MomentCandidate]] = {}
    try:
        with open(path, newline="") as handle:
            reader = csv.DictReader(handle)
            for row in reader:
                ranked.setdefault(row["query_id"], []).append(
                    MomentCandidate(
                        video=corpus.video_index(row["video_id"]),
                        start=int(row["t_s"]),
                        end=int(row["t_e"]),
                        score=float(row["psi"]),
                    )
                )
    except OSError as exc:
        raise errors.IoFailure(f"cannot read rankings {path}: {exc}") from exc
    except (KeyError, TypeError, ValueError) as exc:
        raise errors.ParseError(f"malformed rankings CSV {path}: {exc}") from exc
    return ranked


def cmd_eval(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    out_dir = Path(args.out)
    _snapshot(config, out_dir, "eval")
    set_mode("fast")
    corpus = load_manifest(args.manifest)
    rank_config = RankConfig.from_dict(config["rank"])
    gt = _ground_truth(corpus)
    if args.rankings:
        ranked_by_task = {args.mode: _read_rankings(args.rankings, corpus)}
    else:
        if not args.checkpoint:
            raise errors.SpecInvalid("eval needs --rankings or --checkpoint")
        params, model_config, _ = _load_params(
            args.checkpoint, ModelConfig.from_dict(config["model"])
        )
        ranked_by_task = {
            mode: _rank_all(corpus, params, model_config, rank_config, mode, int(config["threads"]))
            for mode in ("VCMR", "VMR", "VR")
        }
    report = build_report(
        ranked_by_task,
        gt,
        rank_config.k_values,
        rank_config.iou_thresholds,
        breakdown_task=args.mode if args.rankings else "VCMR",
    )
    (out_dir / "metrics.json").write_text(report.to_json())
    print(report.table())
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    out_dir = Path(args.out)
    _snapshot(config, out_dir, "bench")
    lengths = config["bench"]["lengths"]
    report = scaling_bench(
        lengths,
        model_config=ModelConfig.from_dict(config["model"]),
        seed=int(config["seed"]),
        repeats=int(config["bench"]["repeats"]),
    )
    report.write_csv(out_dir / "bench.csv")
    (out_dir / "bench_slopes.json").write_text(report.to_json())
    for name, slope in sorted(report.slopes.items()):
        print(f"{name}: {slope:.3f}")
    return EXIT_OK


def cmd_export_relevance(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    out_dir = Path(args.out)
    _snapshot(config, out_dir, "export-relevance")
    set_mode("fast")
    corpus = load_manifest(args.manifest)
    matches = [q for q in corpus.queries if q.query_id == args.query]
    if not matches:
        raise errors.DanglingReference(f"query {args.query} not in manifest")
    query = matches[0]
    video = corpus.video_by_id(query.gt_video_id)
    params, model_config, _ = _load_params(args.checkpoint, ModelConfig.from_dict(config["model"]))
    scorer, generator = _clients(config, corpus.dim)
    cache = PriorCache(_cache_root(config, out_dir))

    corpus_prior = corpus.priors.lookup(query.query_id, query.gt_video_id)
    if corpus_prior is None:
        corpus_prior = build_prior(query, video, scorer, generator, cache)
    # "no-subtitle" variant regenerates the prior from the query text alone.
    bare_prompt = compose_prompt(query.text, [], scorer)
    key = cache.key(query.query_id, video.video_id, bare_prompt)
    bare = cache.load(key)
    if bare is None:
        from .data.types import GeneratedPrior, PriorQuality

        bare = GeneratedPrior(
            query_id=query.query_id,
            video_id=video.video_id,
            features=generator.generate(bare_prompt),
            quality=PriorQuality.CORRECT,
            prompt_text=bare_prompt,
        )
        cache.store(key, bare)

    query_vec = corpus.query_vector(query.query_id)
    variants = {}
    with no_grad():
        select_cfg = ModelConfig.from_dict({**model_config.to_dict(), "selector_mode": "select"})
        out_full = forward(video.features, query_vec, corpus_prior.features.array, params, select_cfg)
        variants["full"] = (out_full.r.data.copy(), out_full.selector_scores.data.copy())
        out_nosub = forward(video.features, query_vec, bare.features.array, params, select_cfg)
        variants["no-subtitle"] = (out_nosub.r.data.copy(), out_nosub.selector_scores.data.copy())
        off_cfg = ModelConfig.from_dict({**model_config.to_dict(), "selector_mode": "off"})
        out_text = forward(video.features, query_vec, None, params, off_cfg)
        variants["text-only"] = (out_text.r.data.copy(), None)
        concat_cfg = ModelConfig.from_dict({**model_config.to_dict(), "selector_mode": "concat"})
        out_concat = forward(video.features, query_vec, corpus_prior.features.array, params, concat_cfg)
        variants["no-selector"] = (out_concat.r.data.copy(), None)
    path = out_dir / f"relevance_{query.query_id}.csv"
    export_relevance_map(variants, path)
    print(f"relevance map: {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="genspan",
        description="Desk-scale video-corpus moment retrieval engine.",
    )
    parser.add_argument("--config", help="JSON config file", default=None)
    parser.add_argument("--seed", type=int, default=None, help="seed override")
    parser.add_argument("--threads", type=int, default=None, help="worker cap")
    parser.add_argument("--out", default="out", help="output directory")

    # Global flags repeat on subcommands (SUPPRESS keeps them from clobbering
    # values parsed before the subcommand name).
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS)

    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("synth", help="generate a synthetic corpus", parents=[common])

    p_prior = sub.add_parser("prior", help="build/cache priors for a manifest", parents=[common])
    p_prior.add_argument("--manifest", required=True)

    p_train = sub.add_parser("train", help="train a model", parents=[common])
    p_train.add_argument("--manifest", required=True)
    p_train.add_argument("--epochs", type=int, default=None)

    p_rank = sub.add_parser("rank", help="rank moments for every query", parents=[common])
    p_rank.add_argument("--manifest", required=True)
    p_rank.add_argument("--checkpoint", required=True)
    p_rank.add_argument("--mode", choices=["VCMR", "VMR", "VR"], default="VCMR")

    p_eval = sub.add_parser("eval", help="compute recall metrics", parents=[common])
    p_eval.add_argument("--manifest", required=True)
    p_eval.add_argument("--checkpoint", default=None)
    p_eval.add_argument("--rankings", default=None, help="previously exported rankings CSV")
    p_eval.add_argument("--mode", choices=["VCMR", "VMR", "VR"], default="VCMR")

    sub.add_parser("bench", help="sequence-length scaling benchmark", parents=[common])

    p_rel = sub.add_parser("export-relevance", help="per-variant relevance map CSV", parents=[common])
    p_rel.add_argument("--manifest", required=True)
    p_rel.add_argument("--checkpoint", required=True)
    p_rel.add_argument("--query", required=True)

    return parser


_COMMANDS = {
    "synth": cmd_synth,
    "prior": cmd_prior,
    "train": cmd_train,
    "rank": cmd_rank,
    "eval": cmd_eval,
    "bench": cmd_bench,
    "export-relevance": cmd_export_relevance,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except _CLIENT_ERRORS as exc:
        print(f"client error: {exc}", file=sys.stderr)
        return EXIT_CLIENT
    except _CONFIG_ERRORS as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _DATA_ERRORS as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except errors.GenSpanError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    finally:
        set_mode("test")


if __name__ == "__main__":
    sys.exit(main())
