"""Frozen-encoder decade classifier trained on chronotext TSV exports."""

from .data import HashTokenizer, TokenizedDataset, load_dataset, read_rows
from .errors import DivergedLoss, FinetuneError, MissingPretrained, SchemaError
from .model import DecadeClassifier, HeadArchitecture, build_model
from .training import TrainConfig, TrainingLog, predict_batch, train

__version__ = "0.1.0"

__all__ = [
    "DecadeClassifier",
    "DivergedLoss",
    "FinetuneError",
    "HashTokenizer",
    "HeadArchitecture",
    "MissingPretrained",
    "SchemaError",
    "TokenizedDataset",
    "TrainConfig",
    "TrainingLog",
    "build_model",
    "load_dataset",
    "predict_batch",
    "read_rows",
    "train",
    "__version__",
]
