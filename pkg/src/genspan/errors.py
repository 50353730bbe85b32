"""Exception taxonomy shared across the engine.

Every error raised by the package derives from GenSpanError so callers (and
the CLI) can map failures to exit codes by family.
"""


class GenSpanError(Exception):
    """Base class for all package errors."""


# --- tensor engine ---------------------------------------------------------

class DimMismatch(GenSpanError):
    """Operand shapes are incompatible for the requested operation."""


class NonFiniteValue(GenSpanError):
    """A tensor or loss contains NaN or Inf."""


class NonScalarLoss(GenSpanError):
    """backward() was called on a non-scalar node."""


class IndexOutOfRange(GenSpanError):
    """A gather/scatter index falls outside the valid range."""


# --- data model / persistence ----------------------------------------------

class BadMagic(GenSpanError):
    """A binary file does not start with the expected magic bytes."""


class VersionUnsupported(GenSpanError):
    """A binary file declares a format version this build cannot read."""


class TruncatedPayload(GenSpanError):
    """A binary file ends before the payload its header promises."""


class IoFailure(GenSpanError):
    """An OS-level read/write failed."""


class ParseError(GenSpanError):
    """A manifest or config document is malformed."""


class DanglingReference(GenSpanError):
    """A manifest entry references an id that does not exist."""


class SpanOutOfBounds(GenSpanError):
    """A clip span violates 1 <= start <= end <= video length."""


class NameMismatch(GenSpanError):
    """Checkpoint parameter names do not match the target model config."""


# --- prior pipeline ----------------------------------------------------------

class ClientFailure(GenSpanError):
    """An external scorer/generator client failed or returned garbage."""


class EmptyDecomposition(GenSpanError):
    """Query decomposition was requested for an empty query."""


class CacheCorruption(GenSpanError):
    """A cached prior exists on disk but cannot be read back."""


# --- synthesis / model / training -------------------------------------------

class SpecInvalid(GenSpanError):
    """A generator spec or model config violates its invariants."""


class ProbOutOfRange(GenSpanError):
    """A probability input falls outside [0, 1]."""


class NoNegatives(GenSpanError):
    """Contrastive loss was invoked without any negative sample."""


# --- retrieval / evaluation --------------------------------------------------

class UnknownVideo(GenSpanError):
    """Single-video ranking was requested for a video id not in the corpus."""


class EmptyQuerySet(GenSpanError):
    """A metric was requested over zero queries."""


class MissingAnnotation(GenSpanError):
    """A query lacks the annotation a breakdown requires."""


class InsufficientPoints(GenSpanError):
    """A benchmark fit was requested with fewer than 3 sequence lengths."""
