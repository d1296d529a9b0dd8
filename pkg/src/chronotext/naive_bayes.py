"""Multinomial naive Bayes over token counts, trained and scored from scratch.

Training estimates, for each class c and token t,

    P(c)   = docs_in_c / total_docs
    P(t|c) = (count(t, c) + alpha) / (total_tokens_c + alpha * |V|)

with V the vocabulary over the whole training set and alpha > 0 the
additive smoothing weight (alpha = 1 is Laplace smoothing). Scoring sums
logs instead of multiplying probabilities so long documents cannot
underflow, skips tokens outside V, and breaks exact ties in favor of the
earliest decade.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import DecadeLabel, decode_decade
from .errors import (
    InvalidAlpha,
    MalformedRecord,
    MissingClass,
    UnknownLabel,
)

MODEL_FORMAT = "chronotext-nb"
MODEL_VERSION = 1

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


@dataclass(frozen=True)
class TokenizerConfig:
    lowercase: bool = True
    keep_numbers: bool = True


def tokenize(text: str, config: TokenizerConfig | None = None) -> list[str]:
    """Split text into maximal runs of letters or digits.

    Lowercasing is on by default; with keep_numbers off, purely numeric
    tokens are dropped.
    """
    config = config or TokenizerConfig()
    if config.lowercase:
        text = text.lower()
    tokens = _TOKEN_RE.findall(text)
    if not config.keep_numbers:
        tokens = [t for t in tokens if not t.isdigit()]
    return tokens


@dataclass(frozen=True)
class NaiveBayesModel:
    alpha: float
    classes: tuple[DecadeLabel, ...]
    log_priors: tuple[float, ...]
    log_likelihoods: tuple[dict[str, float], ...]
    vocabulary: tuple[str, ...]
    tokenizer: TokenizerConfig = TokenizerConfig()
    vocab_set: frozenset[str] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "vocab_set", frozenset(self.vocabulary))


def train(
    docs: list[tuple[list[str], DecadeLabel]],
    alpha: float = 1.0,
    classes: tuple[DecadeLabel, ...] | None = None,
    tokenizer: TokenizerConfig | None = None,
) -> NaiveBayesModel:
    """Fit the model on (tokens, label) pairs.

    With ``classes`` given, every listed class must appear in the training
    docs; otherwise the class list is the chronologically sorted set of
    labels present.
    """
    if not alpha > 0:
        raise InvalidAlpha(f"smoothing alpha must be > 0, got {alpha}")
    if not docs:
        raise MissingClass("no training documents")
    present = {label for _, label in docs}
    if classes is None:
        classes = tuple(sorted(present))
    else:
        missing = [c.name for c in classes if c not in present]
        if missing:
            raise MissingClass(
                "no training documents for " + ", ".join(missing)
            )
        unknown = present - set(classes)
        if unknown:
            raise UnknownLabel(
                "training labels outside the class list: "
                + ", ".join(sorted(c.name for c in unknown))
            )

    doc_counts = {c: 0 for c in classes}
    token_counts: dict[DecadeLabel, dict[str, int]] = {c: {} for c in classes}
    vocab: set[str] = set()
    for tokens, label in docs:
        doc_counts[label] += 1
        counts = token_counts[label]
        for token in tokens:
            counts[token] = counts.get(token, 0) + 1
            vocab.add(token)

    vocabulary = tuple(sorted(vocab))
    total_docs = len(docs)
    log_priors = tuple(
        math.log(doc_counts[c] / total_docs) for c in classes
    )
    log_likelihoods = []
    for c in classes:
        counts = token_counts[c]
        total = sum(counts.values())
        denom = total + alpha * len(vocabulary)
        log_likelihoods.append(
            {t: math.log((counts.get(t, 0) + alpha) / denom) for t in vocabulary}
        )
    return NaiveBayesModel(
        alpha=alpha,
        classes=classes,
        log_priors=log_priors,
        log_likelihoods=tuple(log_likelihoods),
        vocabulary=vocabulary,
        tokenizer=tokenizer or TokenizerConfig(),
    )


def log_posterior(model: NaiveBayesModel, tokens: list[str]) -> list[float]:
    """Unnormalized per-class log scores; tokens outside V are skipped."""
    scores = list(model.log_priors)
    for token in tokens:
        if token not in model.vocab_set:
            continue
        for i, lik in enumerate(model.log_likelihoods):
            scores[i] += lik[token]
    return scores


def posterior(model: NaiveBayesModel, tokens: list[str]) -> list[float]:
    """Per-class posterior probabilities, normalized in log space."""
    scores = log_posterior(model, tokens)
    shift = max(scores)
    exps = [math.exp(s - shift) for s in scores]
    total = sum(exps)
    return [e / total for e in exps]


def predict(model: NaiveBayesModel, tokens: list[str]) -> DecadeLabel:
    """Class with the highest log score; ties go to the earliest decade."""
    scores = log_posterior(model, tokens)
    best = 0
    for i in range(1, len(scores)):
        if scores[i] > scores[best]:
            best = i
    return model.classes[best]


def save_model(model: NaiveBayesModel, path: str | Path) -> None:
    """Write the model as a versioned flat text file.

    Floats are stored with repr so loading reproduces them bit for bit.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"{MODEL_FORMAT} {MODEL_VERSION}"]
    lines.append(f"alpha\t{model.alpha!r}")
    lines.append(
        "tokenizer\tlowercase={}\tkeep_numbers={}".format(
            str(model.tokenizer.lowercase).lower(),
            str(model.tokenizer.keep_numbers).lower(),
        )
    )
    lines.append("classes\t" + "\t".join(c.code for c in model.classes))
    for c, lp in zip(model.classes, model.log_priors):
        lines.append(f"prior\t{c.code}\t{lp!r}")
    for c, lik in zip(model.classes, model.log_likelihoods):
        for token in model.vocabulary:
            lines.append(f"lik\t{c.code}\t{token}\t{lik[token]!r}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def load_model(path: str | Path) -> NaiveBayesModel:
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != f"{MODEL_FORMAT} {MODEL_VERSION}":
        raise MalformedRecord(f"{path}: not a {MODEL_FORMAT} v{MODEL_VERSION} file")
    alpha: float | None = None
    tokenizer = TokenizerConfig()
    classes: tuple[DecadeLabel, ...] = ()
    priors: dict[str, float] = {}
    liks: dict[str, dict[str, float]] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        parts = line.split("\t")
        kind = parts[0]
        if kind == "alpha" and len(parts) == 2:
            alpha = float(parts[1])
        elif kind == "tokenizer" and len(parts) == 3:
            flags = dict(p.split("=", 1) for p in parts[1:])
            tokenizer = TokenizerConfig(
                lowercase=flags.get("lowercase") == "true",
                keep_numbers=flags.get("keep_numbers") == "true",
            )
        elif kind == "classes":
            classes = tuple(decode_decade(code) for code in parts[1:])
            liks = {code: {} for code in parts[1:]}
        elif kind == "prior" and len(parts) == 3:
            priors[parts[1]] = float(parts[2])
        elif kind == "lik" and len(parts) == 4:
            try:
                liks[parts[1]][parts[2]] = float(parts[3])
            except KeyError:
                raise MalformedRecord(
                    f"{path}:{lineno}: likelihood row before classes header"
                ) from None
        else:
            raise MalformedRecord(f"{path}:{lineno}: unrecognized row {kind!r}")
    if alpha is None or not classes:
        raise MalformedRecord(f"{path}: missing alpha or classes header")
    if set(priors) != {c.code for c in classes}:
        raise MalformedRecord(f"{path}: prior rows do not match the class list")
    vocabulary = tuple(sorted(liks[classes[0].code])) if classes else ()
    for c in classes:
        if set(liks[c.code]) != set(vocabulary):
            raise MalformedRecord(
                f"{path}: class {c.code} vocabulary differs from class "
                f"{classes[0].code}"
            )
    return NaiveBayesModel(
        alpha=alpha,
        classes=classes,
        log_priors=tuple(priors[c.code] for c in classes),
        log_likelihoods=tuple(dict(liks[c.code]) for c in classes),
        vocabulary=vocabulary,
        tokenizer=tokenizer,
    )
