"""Prediction scoring: confusion matrix, accuracies, loss, error analysis."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

from .corpus import ALL_DECADES, MISCELLANEOUS, DecadeLabel
from .errors import (
    EmptyMatrix,
    MalformedRecord,
    NonFiniteScore,
    UnjoinableId,
    UnknownDecadeCode,
    UnknownLabel,
)
from .naive_bayes import NaiveBayesModel, tokenize

PREDICTIONS_HEADER = ("id", "true_label", "pred_label")


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts[i][j] = articles of true class i predicted as class j."""

    classes: tuple[DecadeLabel, ...]
    counts: tuple[tuple[int, ...], ...]

    @property
    def total(self) -> int:
        return sum(sum(row) for row in self.counts)

    def row_sum(self, i: int) -> int:
        return sum(self.counts[i])


def confusion_matrix(
    pairs: list[tuple[DecadeLabel, DecadeLabel]],
    classes: tuple[DecadeLabel, ...] = ALL_DECADES,
) -> ConfusionMatrix:
    """Count (true, predicted) pairs into a K x K matrix, rows = true."""
    index = {c: i for i, c in enumerate(classes)}
    counts = [[0] * len(classes) for _ in classes]
    for true, pred in pairs:
        if true not in index or pred not in index:
            bad = true if true not in index else pred
            raise UnknownLabel(f"label {bad!r} not in the class list")
        counts[index[true]][index[pred]] += 1
    return ConfusionMatrix(classes, tuple(tuple(row) for row in counts))


def accuracy(cm: ConfusionMatrix) -> float:
    total = cm.total
    if total == 0:
        raise EmptyMatrix("confusion matrix has no observations")
    correct = sum(cm.counts[i][i] for i in range(len(cm.classes)))
    return correct / total


def per_class_accuracy(cm: ConfusionMatrix) -> dict[DecadeLabel, float]:
    """Recall per class; classes with zero support are omitted, not zeroed."""
    out: dict[DecadeLabel, float] = {}
    for i, c in enumerate(cm.classes):
        support = cm.row_sum(i)
        if support:
            out[c] = cm.counts[i][i] / support
    return out


def per_category_accuracy(
    rows: list[tuple[str, DecadeLabel, DecadeLabel]],
    groups: dict[str, str],
) -> dict[str, float]:
    """Accuracy by category group; the Miscellaneous bucket is left out."""
    correct: dict[str, int] = {}
    seen: dict[str, int] = {}
    for id_, true, pred in rows:
        if id_ not in groups:
            raise UnjoinableId(f"prediction id {id_!r} not in the manifest")
        group = groups[id_]
        if group == MISCELLANEOUS:
            continue
        seen[group] = seen.get(group, 0) + 1
        if true == pred:
            correct[group] = correct.get(group, 0) + 1
    return {g: correct.get(g, 0) / n for g, n in sorted(seen.items())}


@dataclass(frozen=True)
class ScoreVector:
    scores: tuple[float, ...]
    true_index: int

    def __post_init__(self) -> None:
        if not self.scores:
            raise ValueError("empty score vector")
        if not 0 <= self.true_index < len(self.scores):
            raise ValueError(
                f"true index {self.true_index} outside 0..{len(self.scores) - 1}"
            )


def cross_entropy_loss(sv: ScoreVector) -> float:
    """Softmax cross entropy, computed against the running maximum.

    Shifting every score by its maximum before exponentiating keeps the
    largest exponent at zero, so arbitrarily large scores cannot overflow
    and a constant added to every score leaves the loss unchanged.
    """
    for s in sv.scores:
        if not math.isfinite(s):
            raise NonFiniteScore(f"non-finite score {s!r}")
    shift = max(sv.scores)
    log_norm = math.log(math.fsum(math.exp(s - shift) for s in sv.scores))
    return log_norm - (sv.scores[sv.true_index] - shift)


@dataclass(frozen=True)
class ErrorCase:
    id: str
    true: DecadeLabel
    pred: DecadeLabel
    top_tokens: tuple[tuple[str, float], ...]


def error_report(
    model: NaiveBayesModel,
    rows: list[tuple[str, DecadeLabel, DecadeLabel]],
    texts: dict[str, str],
    k: int,
) -> list[ErrorCase]:
    """For each misclassified article, the k in-vocabulary tokens that push
    hardest toward the predicted class: largest log P(t|pred) - log P(t|true).
    """
    if k < 0:
        raise ValueError(f"token count k must be >= 0, got {k}")
    class_index = {c: i for i, c in enumerate(model.classes)}
    cases: list[ErrorCase] = []
    for id_, true, pred in rows:
        if true == pred:
            continue
        if id_ not in texts:
            raise UnjoinableId(f"prediction id {id_!r} has no text")
        if true not in class_index or pred not in class_index:
            bad = true if true not in class_index else pred
            raise UnknownLabel(f"label {bad!r} not in the model")
        lik_true = model.log_likelihoods[class_index[true]]
        lik_pred = model.log_likelihoods[class_index[pred]]
        seen = {
            t for t in tokenize(texts[id_], model.tokenizer) if t in model.vocab_set
        }
        ranked = sorted(
            ((t, lik_pred[t] - lik_true[t]) for t in seen),
            key=lambda item: (-item[1], item[0]),
        )
        cases.append(ErrorCase(id_, true, pred, tuple(ranked[:k])))
    return cases


def heatmap_svg(cm: ConfusionMatrix) -> str:
    """Row-normalized confusion heatmap; brightness rises with the value."""
    k = len(cm.classes)
    cell = 56
    left, top = 90, 70
    width = left + k * cell + 30
    height = top + k * cell + 40
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width} {height}" '
        f'font-family="sans-serif" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="#ffffff"/>',
        f'<text x="{left + k * cell / 2:.1f}" y="24" text-anchor="middle" '
        'font-size="15">Confusion matrix (rows: true decade, row-normalized)'
        "</text>",
    ]
    for i, c in enumerate(cm.classes):
        parts.append(
            f'<text x="{left - 8}" y="{top + i * cell + cell / 2 + 4:.1f}" '
            f'text-anchor="end">{c.name}</text>'
        )
        parts.append(
            f'<text x="{left + i * cell + cell / 2:.1f}" y="{top - 10}" '
            f'text-anchor="middle">{c.name}</text>'
        )
    for i in range(k):
        support = cm.row_sum(i)
        for j in range(k):
            value = cm.counts[i][j] / support if support else 0.0
            lightness = 15.0 + 70.0 * value
            x, y = left + j * cell, top + i * cell
            parts.append(
                f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" '
                f'fill="hsl(215, 65%, {lightness:.1f}%)" stroke="#ffffff"/>'
            )
            text_fill = "#ffffff" if value < 0.5 else "#1a1a1a"
            parts.append(
                f'<text x="{x + cell / 2:.1f}" y="{y + cell / 2 + 4:.1f}" '
                f'text-anchor="middle" fill="{text_fill}">{cm.counts[i][j]}</text>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_heatmap_svg(cm: ConfusionMatrix, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(heatmap_svg(cm), encoding="utf-8", newline="\n")


def write_predictions(
    rows: list[tuple[str, DecadeLabel, DecadeLabel]], path: str | Path
) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PREDICTIONS_HEADER)
        for id_, true, pred in rows:
            writer.writerow([id_, true.code, pred.code])


def read_predictions(
    path: str | Path,
) -> list[tuple[str, DecadeLabel, DecadeLabel]]:
    from .corpus import decode_decade

    path = Path(path)
    rows: list[tuple[str, DecadeLabel, DecadeLabel]] = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != PREDICTIONS_HEADER:
            raise MalformedRecord(
                f"{path}: expected header {','.join(PREDICTIONS_HEADER)}"
            )
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != 3:
                raise MalformedRecord(f"{path}:{lineno}: expected 3 columns")
            try:
                rows.append((rec[0], decode_decade(rec[1]), decode_decade(rec[2])))
            except UnknownDecadeCode as exc:
                raise UnknownLabel(f"{path}:{lineno}: {exc}") from None
    return rows
