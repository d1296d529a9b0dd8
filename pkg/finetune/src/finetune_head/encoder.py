"""Frozen sentence encoders: a bundled miniature one and a local full one.

Both expose the same contract: ``hidden_size`` and ``pool(input_ids, mask)
-> (n, hidden_size)`` summary vectors, with every parameter frozen.
"""

from __future__ import annotations

from pathlib import Path

import torch
from torch import nn

from .errors import MissingPretrained

HIDDEN_SIZE = 768
_TOY_VOCAB = 4096
_TOY_POSITIONS = 512
_TOY_LAYERS = 2
# Internal constant, not the run seed: the miniature encoder plays the role
# of a fixed pretrained artifact, so its weights must never vary per run.
_TOY_WEIGHT_SEED = 0x5EED


class MiniatureEncoder(nn.Module):
    """Small cased transformer with fixed pseudo-pretrained weights.

    Two self-attention layers over hashed token ids. Construction is
    deterministic and independent of the caller's RNG state, so every
    build yields byte-identical weights, standing in for downloading the
    same checkpoint twice.
    """

    def __init__(self) -> None:
        super().__init__()
        with torch.random.fork_rng(devices=[]):
            torch.manual_seed(_TOY_WEIGHT_SEED)
            self.token_embedding = nn.Embedding(_TOY_VOCAB, HIDDEN_SIZE)
            self.position_embedding = nn.Embedding(_TOY_POSITIONS, HIDDEN_SIZE)
            nn.init.normal_(self.token_embedding.weight, std=0.05)
            nn.init.normal_(self.position_embedding.weight, std=0.05)
            layer = nn.TransformerEncoderLayer(
                d_model=HIDDEN_SIZE,
                nhead=12,
                dim_feedforward=1024,
                dropout=0.0,
                activation="gelu",
                batch_first=True,
            )
            self.layers = nn.TransformerEncoder(
                layer, num_layers=_TOY_LAYERS, enable_nested_tensor=False
            )
            self.pooler = nn.Linear(HIDDEN_SIZE, HIDDEN_SIZE)
        self.hidden_size = HIDDEN_SIZE
        for param in self.parameters():
            param.requires_grad_(False)
        self.eval()

    @torch.no_grad()
    def pool(self, input_ids: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
        positions = torch.arange(input_ids.shape[1], device=input_ids.device)
        hidden = self.token_embedding(input_ids) + self.position_embedding(
            positions
        )
        hidden = self.layers(hidden, src_key_padding_mask=~mask)
        # Masked mean over real positions: the summary must respond to the
        # tokens present, which the constant first-position slot cannot.
        weights = mask.unsqueeze(-1).to(hidden.dtype)
        summed = (hidden * weights).sum(dim=1)
        return torch.tanh(self.pooler(summed / weights.sum(dim=1)))


class PretrainedEncoder(nn.Module):
    """Full-size cased encoder loaded from a local directory only."""

    def __init__(self, encoder_dir: str | Path) -> None:
        super().__init__()
        path = Path(encoder_dir)
        if not path.is_dir():
            raise MissingPretrained(
                f"no local encoder directory at {path}; full mode never "
                "downloads, so the checkpoint must already be on disk"
            )
        try:
            from transformers import AutoModel
        except ImportError as exc:
            raise MissingPretrained(
                "full mode needs the 'full' extra installed"
            ) from exc
        try:
            self.inner = AutoModel.from_pretrained(
                str(path), local_files_only=True
            )
        except Exception as exc:
            raise MissingPretrained(f"cannot load encoder from {path}: {exc}")
        self.hidden_size = int(self.inner.config.hidden_size)
        for param in self.parameters():
            param.requires_grad_(False)
        self.eval()

    @torch.no_grad()
    def pool(self, input_ids: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
        out = self.inner(input_ids=input_ids, attention_mask=mask.long())
        if getattr(out, "pooler_output", None) is not None:
            return out.pooler_output
        return out.last_hidden_state[:, 0, :]


def encoder_state_bytes(encoder: nn.Module) -> bytes:
    """Canonical serialization of all encoder weights, for identity checks."""
    chunks = []
    for name, tensor in sorted(encoder.state_dict().items()):
        chunks.append(name.encode("utf-8"))
        chunks.append(tensor.detach().cpu().contiguous().numpy().tobytes())
    return b"".join(chunks)
