"""Corpus data types, binary formats, and manifest/checkpoint persistence."""

from .checkpoint import Checkpoint, check_param_names, load_checkpoint, load_into, save_checkpoint
from .features import read_features, write_features
from .manifest import load_manifest, write_manifest
from .types import (
    Corpus,
    CorpusVideo,
    FeatureSequence,
    GeneratedPrior,
    PriorQuality,
    PriorStore,
    QuerySample,
    Subtitle,
)

__all__ = [
    "Checkpoint",
    "Corpus",
    "CorpusVideo",
    "FeatureSequence",
    "GeneratedPrior",
    "PriorQuality",
    "PriorStore",
    "QuerySample",
    "Subtitle",
    "check_param_names",
    "load_checkpoint",
    "load_into",
    "load_manifest",
    "read_features",
    "save_checkpoint",
    "write_features",
    "write_manifest",
]
