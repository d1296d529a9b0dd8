"""Category grouping, corpus filtering, train/test splitting, TSV export.

Raw section names coming out of the archive are noisy and fine grained, so
they are folded into eleven coarse groups plus Miscellaneous for anything
unrecognized. Splitting is deterministic for a given seed and stratified by
decade so both sides keep the decade mix of the input.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path

from .cleaning import normalize_ws
from .corpus import (
    CATEGORY_GROUPS,
    MISCELLANEOUS,
    CorpusManifest,
    DecadeLabel,
    ManifestRow,
    decode_decade,
)
from .errors import (
    MalformedRecord,
    MissingText,
    TooFewPerClass,
    UnknownGroup,
)

# Raw section name -> category group. Anything absent maps to Miscellaneous.
DEFAULT_CATEGORY_MAPPING: dict[str, str] = {
    # Art, fashion, food
    "Arts": "Art, Fashion, Food and Wine",
    "Art & Design": "Art, Fashion, Food and Wine",
    "Fashion": "Art, Fashion, Food and Wine",
    "Fashion & Style": "Art, Fashion, Food and Wine",
    "Style": "Art, Fashion, Food and Wine",
    "Food": "Art, Fashion, Food and Wine",
    "Dining": "Art, Fashion, Food and Wine",
    "Dining & Wine": "Art, Fashion, Food and Wine",
    # Opinion and personal writing
    "Opinion": "Blogs, OpEds, and Obituaries",
    "Editorial": "Blogs, OpEds, and Obituaries",
    "Op-Ed": "Blogs, OpEds, and Obituaries",
    "Letters": "Blogs, OpEds, and Obituaries",
    "Obituaries": "Blogs, OpEds, and Obituaries",
    "Blogs": "Blogs, OpEds, and Obituaries",
    "Sunday Review": "Blogs, OpEds, and Obituaries",
    # Long form print
    "Books": "Books and Magazines",
    "Book Review": "Books and Magazines",
    "Magazine": "Books and Magazines",
    "T Magazine": "Books and Magazines",
    # Money
    "Business": "Business and Finance",
    "Business Day": "Business and Finance",
    "Financial": "Business and Finance",
    "Your Money": "Business and Finance",
    "DealBook": "Business and Finance",
    "Job Market": "Business and Finance",
    # Domestic news and culture
    "U.S.": "Domestic and Culture",
    "National": "Domestic and Culture",
    "New York": "Domestic and Culture",
    "N.Y. / Region": "Domestic and Culture",
    "Metropolitan": "Domestic and Culture",
    "Washington": "Domestic and Culture",
    "Culture": "Domestic and Culture",
    "Society": "Domestic and Culture",
    "Education": "Domestic and Culture",
    # Shows and screens
    "Movies": "Entertainment",
    "Theater": "Entertainment",
    "Television": "Entertainment",
    "Music": "Entertainment",
    "Arts & Leisure": "Entertainment",
    # Abroad
    "World": "International",
    "Foreign": "International",
    "International": "International",
    "Americas": "International",
    "Europe": "International",
    "Asia Pacific": "International",
    "Middle East": "International",
    "Africa": "International",
    # Living
    "Travel": "Lifestyle",
    "Real Estate": "Lifestyle",
    "Home & Garden": "Lifestyle",
    "Garden": "Lifestyle",
    "Automobiles": "Lifestyle",
    "Well": "Lifestyle",
    "Home": "Lifestyle",
    # Wire style news
    "News": "News",
    "Front Page": "News",
    "Briefing": "News",
    "Week in Review": "News",
    # Science and technology
    "Science": "Science And Tech",
    "Technology": "Science And Tech",
    "Health": "Science And Tech",
    "Climate": "Science And Tech",
    "Space": "Science And Tech",
    # Sports
    "Sports": "Sports",
}

TSV_HEADER = ("id", "label", "category", "text")


@dataclass(frozen=True)
class CategoryMapping:
    """Raw section name -> group table; unknown names give Miscellaneous."""

    entries: tuple[tuple[str, str], ...] = tuple(DEFAULT_CATEGORY_MAPPING.items())

    def __post_init__(self) -> None:
        for raw, group in self.entries:
            if group not in CATEGORY_GROUPS:
                raise UnknownGroup(f"mapping {raw!r} -> unknown group {group!r}")
        object.__setattr__(self, "_table", dict(self.entries))

    def map_category(self, raw_category: str) -> str:
        return self._table.get(raw_category.strip(), MISCELLANEOUS)  # type: ignore[attr-defined]


def load_mapping(path: str | Path) -> CategoryMapping:
    """Read mapping overrides from a CSV with header ``raw,group``.

    File entries are applied on top of the built-in table and win on
    conflict.
    """
    import csv

    path = Path(path)
    table = dict(DEFAULT_CATEGORY_MAPPING)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["raw", "group"]:
            raise MalformedRecord(f"{path}: expected header raw,group")
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != 2:
                raise MalformedRecord(f"{path}:{lineno}: expected 2 columns")
            table[rec[0].strip()] = rec[1].strip()
    return CategoryMapping(entries=tuple(table.items()))


def count_by_group(
    manifest: CorpusManifest, mapping: CategoryMapping | None = None
) -> dict[str, int]:
    mapping = mapping or CategoryMapping()
    counts: dict[str, int] = {}
    for row in manifest.rows:
        group = mapping.map_category(row.raw_category)
        counts[group] = counts.get(group, 0) + 1
    return counts


def filter_corpus(
    manifest: CorpusManifest,
    mapping: CategoryMapping | None = None,
    decades: set[int] | None = None,
    groups: set[str] | None = None,
) -> CorpusManifest:
    """Keep rows matching the requested decades and/or category groups.

    When a group filter is active, Miscellaneous rows are always dropped,
    even if Miscellaneous itself is requested: the catch-all bucket is not a
    real category.
    """
    mapping = mapping or CategoryMapping()
    if groups is not None:
        for g in groups:
            if g not in CATEGORY_GROUPS:
                raise UnknownGroup(f"unknown category group {g!r}")
    kept: list[ManifestRow] = []
    for row in manifest.rows:
        if decades is not None and row.decade.decade_start not in decades:
            continue
        if groups is not None:
            group = mapping.map_category(row.raw_category)
            if group == MISCELLANEOUS or group not in groups:
                continue
        kept.append(row)
    return CorpusManifest(tuple(kept), source_path=manifest.source_path)


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.716
    seed: int = 42
    stratify_by: str = "decade"

    def __post_init__(self) -> None:
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError(f"train fraction {self.train_fraction} outside (0, 1)")
        if self.stratify_by not in ("decade", "none"):
            raise ValueError(f"unknown stratify key {self.stratify_by!r}")


def _train_size(n: int, fraction: float) -> int:
    # Round to nearest, then keep both sides non-empty.
    return min(n - 1, max(1, round(fraction * n)))


def train_test_split(
    manifest: CorpusManifest, spec: SplitSpec | None = None
) -> tuple[CorpusManifest, CorpusManifest]:
    """Deterministic seeded split; stratified by decade unless disabled.

    Each decade keeps the train fraction to within one article and both
    sides stay non-empty per decade. Output rows preserve the input order,
    so the same seed and input give byte-identical outputs.
    """
    spec = spec or SplitSpec()
    if not manifest.rows:
        raise TooFewPerClass("cannot split an empty manifest")
    rng = random.Random(spec.seed)
    train_idx: set[int] = set()
    if spec.stratify_by == "decade":
        by_decade: dict[int, list[int]] = {}
        for i, row in enumerate(manifest.rows):
            by_decade.setdefault(row.decade.decade_start, []).append(i)
        for decade_start in sorted(by_decade):
            indices = by_decade[decade_start]
            if len(indices) < 2:
                raise TooFewPerClass(
                    f"decade {decade_start}s has {len(indices)} article(s); "
                    "need at least 2 to split"
                )
            rng.shuffle(indices)
            k = _train_size(len(indices), spec.train_fraction)
            train_idx.update(indices[:k])
    else:
        if len(manifest.rows) < 2:
            raise TooFewPerClass("need at least 2 articles to split")
        indices = list(range(len(manifest.rows)))
        rng.shuffle(indices)
        k = _train_size(len(indices), spec.train_fraction)
        train_idx.update(indices[:k])
    train_rows = tuple(r for i, r in enumerate(manifest.rows) if i in train_idx)
    test_rows = tuple(r for i, r in enumerate(manifest.rows) if i not in train_idx)
    return (
        CorpusManifest(train_rows, source_path=manifest.source_path),
        CorpusManifest(test_rows, source_path=manifest.source_path),
    )


def sample_manifest(manifest: CorpusManifest, n: int, seed: int) -> CorpusManifest:
    """Deterministic subsample of ``n`` rows, input order preserved."""
    if n >= len(manifest.rows):
        return manifest
    if n < 1:
        raise TooFewPerClass(f"sample size must be >= 1, got {n}")
    rng = random.Random(seed)
    chosen = sorted(rng.sample(range(len(manifest.rows)), n))
    return CorpusManifest(
        tuple(manifest.rows[i] for i in chosen), source_path=manifest.source_path
    )


def _tsv_field(value: str) -> str:
    # Collapsing whitespace also turns tabs and newlines into single
    # spaces, which keeps every row at exactly 3 tab characters.
    return normalize_ws(value)


def export_tsv(
    manifest: CorpusManifest, texts: dict[str, str], path: str | Path
) -> None:
    """Write ``id<TAB>label<TAB>category<TAB>text`` rows, UTF-8, LF only."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["\t".join(TSV_HEADER)]
    for row in manifest.rows:
        if row.id not in texts:
            raise MissingText(f"no text for article {row.id}")
        lines.append(
            "\t".join(
                (
                    _tsv_field(row.id),
                    row.decade.code,
                    _tsv_field(row.raw_category),
                    _tsv_field(texts[row.id]),
                )
            )
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


@dataclass(frozen=True)
class TsvRow:
    id: str
    label: DecadeLabel
    category: str
    text: str


def read_tsv(path: str | Path) -> list[TsvRow]:
    """Parse an exported TSV back into rows, validating shape and labels."""
    path = Path(path)
    rows: list[TsvRow] = []
    with path.open(encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if tuple(header.split("\t")) != TSV_HEADER:
            raise MalformedRecord(f"{path}: expected header {' '.join(TSV_HEADER)}")
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise MalformedRecord(
                    f"{path}:{lineno}: expected 3 tabs, got {len(parts) - 1}"
                )
            id_, code, category, text = parts
            rows.append(TsvRow(id_, decode_decade(code), category, text))
    return rows
