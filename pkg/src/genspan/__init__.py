"""GenSpan: desk-scale video-corpus moment retrieval engine."""

__version__ = "0.1.0"
