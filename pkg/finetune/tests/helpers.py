"""Synthetic TSV corpora for the fine-tuning tests.

The generator is the oracle: every document carries class-unique marker
tokens (cased, to exercise the case-sensitive pathway), so the true decade
of each row is known by construction.
"""

from __future__ import annotations

import random
from pathlib import Path

CODES = "678901"


def separable_rows(
    seed: int, docs_per_class: int = 20, length: int = 15
) -> list[tuple[str, str, str, str]]:
    rng = random.Random(seed)
    rows = []
    for code in CODES:
        for i in range(docs_per_class):
            words = [
                f"Era{code}Sign{rng.randrange(4)}" if j % 2 == 0
                else f"filler{rng.randrange(40)}"
                for j in range(length)
            ]
            rows.append(
                (f"doc{code}{i:02d}", code, "Sports", " ".join(words))
            )
    return rows


def write_tsv(path: Path, rows: list[tuple[str, str, str, str]]) -> Path:
    lines = ["id\tlabel\tcategory\ttext"]
    lines += ["\t".join(row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def separable_tsv(path: Path, seed: int = 42, docs_per_class: int = 20,
                  length: int = 15) -> Path:
    return write_tsv(path, separable_rows(seed, docs_per_class, length))
