"""Decade-labelled news corpus tooling: ingestion, cleaning, splitting,
statistics, a naive Bayes baseline, and evaluation."""

from .corpus import (
    ALL_DECADES,
    Article,
    CorpusManifest,
    DecadeLabel,
    ManifestRow,
    decode_decade,
    encode_decade,
    format_raw_article,
    parse_raw_article,
)
from .errors import ChronotextError

__version__ = "0.1.0"

__all__ = [
    "ALL_DECADES",
    "Article",
    "ChronotextError",
    "CorpusManifest",
    "DecadeLabel",
    "ManifestRow",
    "decode_decade",
    "encode_decade",
    "format_raw_article",
    "parse_raw_article",
    "__version__",
]
