"""TSV loading and case-sensitive tokenization.

The input format is the flat export produced by the chronotext CLI:
``id<TAB>label<TAB>category<TAB>text`` with a fixed header row and exactly
three tabs per line. Labels are single-character decade codes ordered
chronologically 1960s..2010s as '6','7','8','9','0','1' and map to class
indices 0..5 in that order.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from pathlib import Path

import torch

from .errors import SchemaError

TSV_HEADER = ("id", "label", "category", "text")
CODE_ORDER = "678901"
CODE_TO_INDEX = {code: i for i, code in enumerate(CODE_ORDER)}
INDEX_TO_CODE = {i: code for i, code in enumerate(CODE_ORDER)}

PAD_ID = 0
UNK_ID = 1
CLS_ID = 2
N_SPECIAL = 3

_WORD_RE = re.compile(r"[^\W_]+", re.UNICODE)


class HashTokenizer:
    """Deterministic cased tokenizer over a fixed-size hashed vocabulary.

    Tokens are matched case-sensitively and bucketed by digest, so the same
    string always maps to the same id on every platform and 'Apple' never
    collides with 'apple' except by genuine bucket collision.
    """

    def __init__(self, vocab_size: int = 4096) -> None:
        if vocab_size <= N_SPECIAL:
            raise ValueError(f"vocab_size {vocab_size} too small")
        self.vocab_size = vocab_size

    def token_id(self, token: str) -> int:
        digest = hashlib.sha256(token.encode("utf-8")).digest()
        bucket = int.from_bytes(digest[:8], "big")
        return N_SPECIAL + bucket % (self.vocab_size - N_SPECIAL)

    def encode(self, text: str, max_tokens: int) -> list[int]:
        ids = [CLS_ID]
        for match in _WORD_RE.finditer(text):
            if len(ids) >= max_tokens:
                break
            ids.append(self.token_id(match.group()))
        return ids


@dataclass(frozen=True)
class TokenizedDataset:
    ids: tuple[str, ...]
    codes: tuple[str, ...]
    input_ids: torch.Tensor
    attention_mask: torch.Tensor
    labels: torch.Tensor

    def __len__(self) -> int:
        return len(self.ids)


def read_rows(tsv_path: str | Path) -> list[tuple[str, str, str, str]]:
    """Parse and validate the TSV; returns (id, code, category, text) rows."""
    lines = Path(tsv_path).read_text(encoding="utf-8").splitlines()
    if not lines or tuple(lines[0].split("\t")) != TSV_HEADER:
        raise SchemaError(f"{tsv_path}: missing or wrong header row")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split("\t")
        if len(fields) != 4:
            raise SchemaError(
                f"{tsv_path}:{lineno}: expected 3 tabs, found {len(fields) - 1}"
            )
        id_, code, category, text = fields
        if code not in CODE_TO_INDEX:
            raise SchemaError(
                f"{tsv_path}:{lineno}: unknown decade code {code!r}"
            )
        if not id_:
            raise SchemaError(f"{tsv_path}:{lineno}: empty id")
        rows.append((id_, code, category, text))
    return rows


def load_dataset(
    tsv_path: str | Path,
    max_sequence_tokens: int,
    tokenizer: HashTokenizer | None = None,
) -> TokenizedDataset:
    """Tokenized, padded, label-indexed dataset from one TSV file."""
    if max_sequence_tokens < 2:
        raise ValueError(f"max_sequence_tokens {max_sequence_tokens} < 2")
    tokenizer = tokenizer or HashTokenizer()
    rows = read_rows(tsv_path)
    encoded = [tokenizer.encode(text, max_sequence_tokens) for *_, text in rows]
    width = max((len(e) for e in encoded), default=2)
    input_ids = torch.full((len(rows), width), PAD_ID, dtype=torch.long)
    mask = torch.zeros((len(rows), width), dtype=torch.bool)
    for i, ids in enumerate(encoded):
        input_ids[i, : len(ids)] = torch.tensor(ids, dtype=torch.long)
        mask[i, : len(ids)] = True
    labels = torch.tensor(
        [CODE_TO_INDEX[code] for _, code, _, _ in rows], dtype=torch.long
    )
    return TokenizedDataset(
        ids=tuple(r[0] for r in rows),
        codes=tuple(r[1] for r in rows),
        input_ids=input_ids,
        attention_mask=mask,
        labels=labels,
    )
