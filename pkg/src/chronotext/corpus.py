"""Core corpus model: decade labels, raw article records, and manifests.

An article on disk is a single line of the form ``<code>,<text>`` where the
code is one digit naming the decade of publication (the tens digit of the
decade, so 1980s -> "8" and 2000s -> "0") and everything after the first
comma is the article text. The manifest is a CSV holding one metadata row
per article; article text lives next to it in one ``<id>.txt`` file each.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    DuplicateId,
    EmptyText,
    MalformedRecord,
    MissingText,
    UnknownDecadeCode,
    UnknownGroup,
    YearOutOfRange,
)

MIN_YEAR = 1960
MAX_YEAR = 2019

DECADE_STARTS: tuple[int, ...] = (1960, 1970, 1980, 1990, 2000, 2010)

MANIFEST_HEADER = ("id", "year", "month", "category")

MISCELLANEOUS = "Miscellaneous"

# The eleven named category groups; raw section names that match nothing
# fall into Miscellaneous.
CATEGORY_GROUPS: tuple[str, ...] = (
    "Art, Fashion, Food and Wine",
    "Blogs, OpEds, and Obituaries",
    "Books and Magazines",
    "Business and Finance",
    "Domestic and Culture",
    "Entertainment",
    "International",
    "Lifestyle",
    "News",
    "Science And Tech",
    "Sports",
    MISCELLANEOUS,
)


@dataclass(frozen=True, order=True)
class DecadeLabel:
    """One of the six decades an article can belong to."""

    decade_start: int

    def __post_init__(self) -> None:
        if self.decade_start not in DECADE_STARTS:
            raise YearOutOfRange(f"no decade starts at {self.decade_start}")

    @property
    def code(self) -> str:
        """Single-digit label: the tens digit of the decade."""
        return str((self.decade_start // 10) % 10)

    @property
    def name(self) -> str:
        return f"{self.decade_start}s"


ALL_DECADES: tuple[DecadeLabel, ...] = tuple(DecadeLabel(d) for d in DECADE_STARTS)

_CODE_TO_DECADE = {label.code: label for label in ALL_DECADES}


def encode_decade(year: int) -> DecadeLabel:
    """Map a publication year to its decade label.

    Raises YearOutOfRange for years outside the supported window.
    """
    if not MIN_YEAR <= year <= MAX_YEAR:
        raise YearOutOfRange(f"year {year} outside [{MIN_YEAR}, {MAX_YEAR}]")
    return DecadeLabel((year // 10) * 10)


def decode_decade(code: str) -> DecadeLabel:
    """Map a single-digit decade code back to its label."""
    try:
        return _CODE_TO_DECADE[code]
    except KeyError:
        raise UnknownDecadeCode(f"unknown decade code {code!r}") from None


def parse_raw_article(line: str) -> tuple[DecadeLabel, str]:
    """Split a raw record into its decade label and text.

    Only the first comma separates label from text; the text may contain
    further commas. The text must be non-empty after trimming.
    """
    line = line.rstrip("\n")
    if "," not in line:
        raise MalformedRecord("raw record has no comma separator")
    code, text = line.split(",", 1)
    try:
        label = decode_decade(code)
    except UnknownDecadeCode as exc:
        raise MalformedRecord(str(exc)) from None
    if not text.strip():
        raise EmptyText("raw record has no text after the decade code")
    return label, text


def format_raw_article(label: DecadeLabel, text: str) -> str:
    """Render the one-line raw record; newlines in the text become spaces."""
    flat = text.replace("\r", " ").replace("\n", " ")
    return f"{label.code},{flat}"


@dataclass(frozen=True)
class ManifestRow:
    id: str
    year: int
    month: int
    raw_category: str

    def __post_init__(self) -> None:
        if not self.id:
            raise MalformedRecord("manifest row with empty id")
        encode_decade(self.year)
        if not 1 <= self.month <= 12:
            raise MalformedRecord(f"month {self.month} outside [1, 12] (id {self.id})")

    @property
    def decade(self) -> DecadeLabel:
        return encode_decade(self.year)


@dataclass(frozen=True)
class CorpusManifest:
    """Immutable list of article metadata rows, unique by id."""

    rows: tuple[ManifestRow, ...]
    source_path: str = ""

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for row in self.rows:
            if row.id in seen:
                raise DuplicateId(f"duplicate article id {row.id!r}")
            seen.add(row.id)

    def __len__(self) -> int:
        return len(self.rows)

    def ids(self) -> list[str]:
        return [row.id for row in self.rows]


def load_manifest(path: str | Path) -> CorpusManifest:
    """Read a manifest CSV (columns id,year,month,category).

    Duplicate ids are an error, never silently collapsed.
    """
    path = Path(path)
    rows: list[ManifestRow] = []
    seen: set[str] = set()
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != MANIFEST_HEADER:
            raise MalformedRecord(
                f"{path}: expected header {','.join(MANIFEST_HEADER)}"
            )
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != 4:
                raise MalformedRecord(f"{path}:{lineno}: expected 4 columns")
            id_, year_s, month_s, category = rec
            try:
                year, month = int(year_s), int(month_s)
            except ValueError:
                raise MalformedRecord(
                    f"{path}:{lineno}: year/month not integers"
                ) from None
            if id_ in seen:
                raise DuplicateId(f"{path}: duplicate article id {id_!r}")
            seen.add(id_)
            rows.append(ManifestRow(id_, year, month, category))
    return CorpusManifest(tuple(rows), source_path=str(path))


def save_manifest(manifest: CorpusManifest, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(MANIFEST_HEADER)
        for row in manifest.rows:
            writer.writerow([row.id, row.year, row.month, row.raw_category])


def article_path(text_dir: str | Path, article_id: str) -> Path:
    return Path(text_dir) / f"{article_id}.txt"


def write_raw_article(
    text_dir: str | Path, article_id: str, label: DecadeLabel, text: str
) -> Path:
    path = article_path(text_dir, article_id)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_raw_article(label, text) + "\n", encoding="utf-8")
    return path


def read_raw_article(path: str | Path) -> tuple[DecadeLabel, str]:
    path = Path(path)
    if not path.exists():
        raise MissingText(f"no article file at {path}")
    with path.open(encoding="utf-8") as fh:
        line = fh.readline()
    return parse_raw_article(line)


def load_texts(manifest: CorpusManifest, text_dir: str | Path) -> dict[str, str]:
    """Resolve every manifest row to its text. Missing files are an error."""
    texts: dict[str, str] = {}
    for row in manifest.rows:
        label, text = read_raw_article(article_path(text_dir, row.id))
        if label.decade_start != row.decade.decade_start:
            raise MalformedRecord(
                f"article {row.id}: file labelled {label.name}, "
                f"manifest year {row.year}"
            )
        texts[row.id] = text
    return texts


@dataclass(frozen=True)
class Article:
    """A fully resolved article: manifest metadata joined with its text."""

    id: str
    year: int
    month: int
    raw_category: str
    category_group: str
    text: str
    decade: DecadeLabel = field(init=False)

    def __post_init__(self) -> None:
        if not self.id:
            raise MalformedRecord("article with empty id")
        if not 1 <= self.month <= 12:
            raise MalformedRecord(f"month {self.month} outside [1, 12] (id {self.id})")
        if not self.text.strip():
            raise EmptyText(f"article {self.id} has empty text")
        if self.category_group not in CATEGORY_GROUPS:
            raise UnknownGroup(
                f"article {self.id}: unknown category group {self.category_group!r}"
            )
        object.__setattr__(self, "decade", encode_decade(self.year))
