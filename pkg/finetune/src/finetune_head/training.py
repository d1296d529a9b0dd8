"""Head training loop and prediction output.

Only the head receives gradients; the encoder runs under no_grad and its
weights are expected to be byte-identical before and after training.
"""

from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass
from pathlib import Path

import torch
from torch import nn

from .data import INDEX_TO_CODE, TokenizedDataset
from .errors import DivergedLoss
from .model import DecadeClassifier


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 4e-5
    epsilon: float = 1e-8
    train_batch: int = 16
    eval_batch: int = 8
    epochs: int = 2
    max_sequence_tokens: int = 512
    seed: int = 42
    toy_mode: bool = False

    def __post_init__(self) -> None:
        if self.learning_rate < 0:
            raise ValueError(f"learning_rate {self.learning_rate} < 0")
        for name in ("epsilon", "train_batch", "eval_batch", "epochs",
                     "max_sequence_tokens"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @classmethod
    def toy(cls, seed: int = 42) -> "TrainConfig":
        """Desk-scale regime: short sequences and a learning rate that can
        actually move a fresh head in the ~16 optimizer steps two epochs
        over a 120-document corpus allow. The full-scale default rate
        (4e-5) is mathematically unable to converge in that budget; batch
        size and epoch count keep their full-scale values."""
        return cls(
            learning_rate=2e-3,
            max_sequence_tokens=128,
            toy_mode=True,
            seed=seed,
        )


@dataclass(frozen=True)
class TrainingLog:
    initial_loss: float
    epoch_mean_losses: tuple[float, ...]


def _batches(n: int, size: int, order: list[int]):
    for start in range(0, n, size):
        yield order[start : start + size]


@torch.no_grad()
def mean_loss(model: DecadeClassifier, dataset: TokenizedDataset,
              batch_size: int) -> float:
    loss_fn = nn.CrossEntropyLoss(reduction="sum")
    total = 0.0
    for rows in _batches(len(dataset), batch_size, list(range(len(dataset)))):
        idx = torch.tensor(rows)
        logits = model(dataset.input_ids[idx], dataset.attention_mask[idx])
        total += float(loss_fn(logits, dataset.labels[idx]))
    return total / len(dataset)


def train(model: DecadeClassifier, dataset: TokenizedDataset,
          config: TrainConfig) -> TrainingLog:
    if len(dataset) == 0:
        raise ValueError("empty dataset")
    optimizer = torch.optim.Adam(
        model.trainable_parameters(),
        lr=config.learning_rate,
        eps=config.epsilon,
    )
    loss_fn = nn.CrossEntropyLoss(reduction="sum")
    shuffler = random.Random(config.seed)
    initial = mean_loss(model, dataset, config.eval_batch)
    epoch_means: list[float] = []
    for _ in range(config.epochs):
        order = list(range(len(dataset)))
        shuffler.shuffle(order)
        running = 0.0
        for rows in _batches(len(dataset), config.train_batch, order):
            idx = torch.tensor(rows)
            logits = model(dataset.input_ids[idx], dataset.attention_mask[idx])
            loss = loss_fn(logits, dataset.labels[idx])
            loss_value = float(loss.detach())
            if not math.isfinite(loss_value):
                raise DivergedLoss(
                    f"non-finite loss {loss_value!r} during training"
                )
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            running += loss_value
        epoch_means.append(running / len(dataset))
    return TrainingLog(initial_loss=initial,
                       epoch_mean_losses=tuple(epoch_means))


@torch.no_grad()
def predict_batch(model: DecadeClassifier, dataset: TokenizedDataset,
                  out_csv: str | Path, eval_batch: int = 8) -> int:
    """Writes id,true_label,pred_label rows with decade codes; returns count."""
    preds: list[int] = []
    for rows in _batches(len(dataset), eval_batch, list(range(len(dataset)))):
        idx = torch.tensor(rows)
        logits = model(dataset.input_ids[idx], dataset.attention_mask[idx])
        preds.extend(int(i) for i in logits.argmax(dim=-1))
    path = Path(out_csv)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id", "true_label", "pred_label"])
        for id_, code, pred in zip(dataset.ids, dataset.codes, preds):
            writer.writerow([id_, code, INDEX_TO_CODE[pred]])
    return len(preds)


@torch.no_grad()
def train_accuracy(model: DecadeClassifier, dataset: TokenizedDataset,
                   eval_batch: int = 8) -> float:
    hits = 0
    for rows in _batches(len(dataset), eval_batch, list(range(len(dataset)))):
        idx = torch.tensor(rows)
        logits = model(dataset.input_ids[idx], dataset.attention_mask[idx])
        hits += int((logits.argmax(dim=-1) == dataset.labels[idx]).sum())
    return hits / len(dataset)
