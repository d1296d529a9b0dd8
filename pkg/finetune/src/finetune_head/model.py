"""Classifier: frozen encoder feeding a five-layer fully connected head."""

from __future__ import annotations

from dataclasses import dataclass, field

import torch
from torch import nn

from .encoder import MiniatureEncoder, PretrainedEncoder

N_CLASSES = 6


@dataclass(frozen=True)
class HeadArchitecture:
    """Funnel of five weight layers ending at the six decade classes."""

    widths: tuple[int, ...] = (768, 512, 256, 128, 64, 6)

    def __post_init__(self) -> None:
        if len(self.widths) != 6:
            raise ValueError(
                f"need 6 widths for five weight layers, got {len(self.widths)}"
            )
        if self.widths[-1] != N_CLASSES:
            raise ValueError(f"final width must be {N_CLASSES}")
        if any(w < 1 for w in self.widths):
            raise ValueError("widths must be positive")


class ClassifierHead(nn.Module):
    def __init__(self, arch: HeadArchitecture, generator: torch.Generator) -> None:
        super().__init__()
        layers: list[nn.Module] = []
        pairs = list(zip(arch.widths[:-1], arch.widths[1:]))
        for i, (n_in, n_out) in enumerate(pairs):
            linear = nn.Linear(n_in, n_out)
            last = i == len(pairs) - 1
            # Final layer starts near zero so the untrained softmax is
            # close to uniform; hidden layers get rescaled He init.
            std = 0.01 if last else (2.0 / n_in) ** 0.5
            with torch.no_grad():
                linear.weight.copy_(
                    torch.randn(
                        linear.weight.shape, generator=generator
                    ) * std
                )
                linear.bias.zero_()
            layers.append(linear)
            if not last:
                layers.append(nn.ReLU())
        self.stack = nn.Sequential(*layers)

    def forward(self, pooled: torch.Tensor) -> torch.Tensor:
        return self.stack(pooled)


class DecadeClassifier(nn.Module):
    """Frozen encoder + trainable head; produces per-decade logits."""

    def __init__(self, encoder: nn.Module, head: ClassifierHead) -> None:
        super().__init__()
        self.encoder = encoder
        self.head = head

    def forward(
        self, input_ids: torch.Tensor, mask: torch.Tensor
    ) -> torch.Tensor:
        with torch.no_grad():
            pooled = self.encoder.pool(input_ids, mask)
        return self.head(pooled)

    def probabilities(
        self, input_ids: torch.Tensor, mask: torch.Tensor
    ) -> torch.Tensor:
        return torch.softmax(self.forward(input_ids, mask), dim=-1)

    def trainable_parameters(self) -> list[nn.Parameter]:
        return [p for p in self.parameters() if p.requires_grad]


def build_model(
    arch: HeadArchitecture | None = None,
    *,
    toy_mode: bool,
    seed: int,
    encoder_dir: str | None = None,
) -> DecadeClassifier:
    """Assemble the classifier; only head weights depend on ``seed``."""
    arch = arch or HeadArchitecture()
    if toy_mode:
        encoder = MiniatureEncoder()
    else:
        encoder = PretrainedEncoder(encoder_dir or "")
    if encoder.hidden_size != arch.widths[0]:
        raise ValueError(
            f"encoder width {encoder.hidden_size} != head input {arch.widths[0]}"
        )
    generator = torch.Generator().manual_seed(seed)
    head = ClassifierHead(arch, generator)
    return DecadeClassifier(encoder, head)
