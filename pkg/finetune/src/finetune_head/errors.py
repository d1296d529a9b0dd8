"""Typed failures; ``code`` is the stable machine-readable name."""

from __future__ import annotations


class FinetuneError(Exception):
    @property
    def code(self) -> str:
        return type(self).__name__


class SchemaError(FinetuneError):
    """Input TSV does not match the expected export format."""


class MissingPretrained(FinetuneError):
    """Full-size encoder weights are not available locally."""


class DivergedLoss(FinetuneError):
    """Training produced a non-finite loss."""
