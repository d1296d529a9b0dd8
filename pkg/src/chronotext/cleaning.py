"""Text cleaning: boilerplate stripping, date scrubbing, and truncation.

All operations are pure and idempotent: applying one twice gives the same
text, and the second pass reports zero removals. Whenever something is
removed the surrounding whitespace is collapsed to single spaces; a text in
which nothing matches is returned unchanged. No operation introduces any
character that was not already present, other than single spaces.

Word counts everywhere in the toolkit mean whitespace-separated tokens as
produced by :func:`word_count` here.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .errors import InvalidLimit

# Exact boilerplate sentences injected by the archive frontend, removed by
# exact substring match (no regex, no fuzz).
DEFAULT_BOILERPLATE: tuple[str, ...] = (
    "Credit... The New York Times Archives",
    "Full text is unavailable for this digitized archive article. "
    "Subscribers may view the full text of this article in its original "
    "form through TimesMachine.",
    "NYTimes.com no longer supports Internet Explorer 9 or earlier. "
    "Please upgrade your browser.",
)

MONTH_NAMES: tuple[str, ...] = (
    "January",
    "February",
    "March",
    "April",
    "May",
    "June",
    "July",
    "August",
    "September",
    "October",
    "November",
    "December",
    "Jan.",
    "Feb.",
    "Mar.",
    "Apr.",
    "Aug.",
    "Sept.",
    "Oct.",
    "Nov.",
    "Dec.",
)

DEFAULT_YEAR_RANGE: tuple[int, int] = (1800, 2099)

# "Month Day, Year" with a 1-2 digit day and a 4 digit year.
_DATE_RE = re.compile(
    r"\b(?:" + "|".join(re.escape(m) for m in MONTH_NAMES) + r") \d{1,2}, \d{4}(?!\d)"
)

# A standalone 4 digit token; the numeric range check happens per match.
_YEAR_RE = re.compile(r"(?<!\w)\d{4}(?!\w)")


@dataclass(frozen=True)
class CleaningRules:
    boilerplate_phrases: tuple[str, ...] = DEFAULT_BOILERPLATE
    year_range: tuple[int, int] = DEFAULT_YEAR_RANGE

    def __post_init__(self) -> None:
        for phrase in self.boilerplate_phrases:
            if not phrase.strip():
                raise InvalidLimit("empty boilerplate phrase in rules")
        lo, hi = self.year_range
        if lo > hi:
            raise InvalidLimit(f"year range [{lo}, {hi}] is empty")


@dataclass(frozen=True)
class CleaningReport:
    boilerplate_removed: int = 0
    dates_removed: int = 0
    years_removed: int = 0
    words_truncated: int = 0


def normalize_ws(text: str) -> str:
    """Collapse all whitespace runs to single spaces and trim the ends."""
    return " ".join(text.split())


def word_count(text: str) -> int:
    """Number of whitespace-separated tokens."""
    return len(text.split())


def load_rules(path: str | Path) -> CleaningRules:
    """Read extra boilerplate phrases, one per line, on top of the defaults.

    Blank lines and lines starting with ``#`` are ignored.
    """
    phrases = list(DEFAULT_BOILERPLATE)
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        phrase = line.strip()
        if not phrase or phrase.startswith("#"):
            continue
        if phrase not in phrases:
            phrases.append(phrase)
    return CleaningRules(boilerplate_phrases=tuple(phrases))


def strip_boilerplate(
    text: str, rules: CleaningRules | None = None
) -> tuple[str, int]:
    """Remove every occurrence of every boilerplate phrase.

    Returns the cleaned text and the number of occurrences removed. Passes
    repeat until no phrase remains, so removal can never leave a phrase
    assembled from the fragments around an earlier match.
    """
    rules = rules or CleaningRules()
    total = 0
    current = text
    while True:
        removed = 0
        for phrase in rules.boilerplate_phrases:
            n = current.count(phrase)
            if n:
                current = current.replace(phrase, " ")
                removed += n
        if not removed:
            break
        # Normalizing inside the loop matters: collapsing whitespace can
        # itself complete a phrase that was only off by its spacing.
        current = normalize_ws(current)
        total += removed
    if not total:
        return text, 0
    return current, total


def strip_publication_date(text: str) -> tuple[str, int]:
    """Remove every "Month Day, Year" mention, full or abbreviated month."""
    total = 0
    current = text
    while True:
        current, n = _DATE_RE.subn(" ", current)
        if not n:
            break
        current = normalize_ws(current)
        total += n
    if not total:
        return text, 0
    return current, total


def strip_years(
    text: str, year_range: tuple[int, int] = DEFAULT_YEAR_RANGE
) -> tuple[str, int]:
    """Remove standalone 4 digit year tokens inside ``year_range``.

    Digit runs embedded in longer tokens (room numbers, identifiers) and
    values outside the range stay untouched.
    """
    lo, hi = year_range
    total = 0
    current = text
    while True:
        removed = 0

        def _drop(match: re.Match[str]) -> str:
            nonlocal removed
            if lo <= int(match.group()) <= hi:
                removed += 1
                return " "
            return match.group()

        current = _YEAR_RE.sub(_drop, current)
        if not removed:
            break
        current = normalize_ws(current)
        total += removed
    if not total:
        return text, 0
    return current, total


def truncate_words(text: str, limit: int) -> tuple[str, int]:
    """Keep at most ``limit`` whitespace tokens.

    Returns the truncated text (whitespace normalized) and the number of
    tokens dropped. ``limit`` must be at least 1.
    """
    if limit < 1:
        raise InvalidLimit(f"truncation limit must be >= 1, got {limit}")
    tokens = text.split()
    return " ".join(tokens[:limit]), max(0, len(tokens) - limit)


def clean_article(
    text: str, rules: CleaningRules | None = None
) -> tuple[str, CleaningReport]:
    """Base cleaning pass: boilerplate first, then publication dates.

    Year stripping and truncation are separate corpus variants, not part of
    the base pass; their report fields stay zero here.
    """
    cleaned, n_boiler = strip_boilerplate(text, rules)
    cleaned, n_dates = strip_publication_date(cleaned)
    return cleaned, CleaningReport(
        boilerplate_removed=n_boiler, dates_removed=n_dates
    )
