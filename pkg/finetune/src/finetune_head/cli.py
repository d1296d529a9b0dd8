"""``finetune``: train the frozen-encoder classifier on a TSV, emit preds.

Exit codes match the chronotext convention: 0 success, 1 data error
(one ``Code: message`` line on stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import sys

import torch

from .data import load_dataset
from .errors import FinetuneError
from .model import build_model
from .training import TrainConfig, predict_batch, train, train_accuracy


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="finetune",
        description=(
            "Train a five-layer head over a frozen cased encoder on a "
            "decade-labelled TSV and write a predictions CSV."
        ),
    )
    parser.add_argument("--train", required=True, help="training TSV")
    parser.add_argument("--test", required=True, help="evaluation TSV")
    parser.add_argument("--out", required=True, help="predictions CSV path")
    parser.add_argument("--toy", action="store_true",
                        help="bundled miniature encoder, desk-scale defaults")
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--epochs", type=int, default=None)
    parser.add_argument("--lr", type=float, default=None)
    parser.add_argument("--max-seq", type=int, default=None)
    parser.add_argument("--encoder-dir", default=None,
                        help="local checkpoint directory (full mode)")
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = TrainConfig.toy(seed=args.seed) if args.toy else TrainConfig(
            seed=args.seed
        )
        overrides = {}
        if args.epochs is not None:
            overrides["epochs"] = args.epochs
        if args.lr is not None:
            overrides["learning_rate"] = args.lr
        if args.max_seq is not None:
            overrides["max_sequence_tokens"] = args.max_seq
        if overrides:
            import dataclasses

            config = dataclasses.replace(config, **overrides)

        torch.manual_seed(config.seed)
        train_set = load_dataset(args.train, config.max_sequence_tokens)
        test_set = load_dataset(args.test, config.max_sequence_tokens)
        model = build_model(
            toy_mode=config.toy_mode,
            seed=config.seed,
            encoder_dir=args.encoder_dir,
        )
        log = train(model, train_set, config)
        print(f"initial loss {log.initial_loss:.4f}")
        for epoch, value in enumerate(log.epoch_mean_losses, start=1):
            print(f"epoch {epoch} mean loss {value:.4f}")
        acc = train_accuracy(model, train_set, config.eval_batch)
        print(f"train accuracy {acc:.4f}")
        n = predict_batch(model, test_set, args.out, config.eval_batch)
        print(f"wrote {n} predictions to {args.out}")
        return 0
    except FinetuneError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"IoError: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())
