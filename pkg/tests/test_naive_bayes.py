from __future__ import annotations

import math
import random
from fractions import Fraction
from pathlib import Path

import pytest

from chronotext.corpus import ALL_DECADES, decode_decade
from chronotext.errors import (
    InvalidAlpha,
    MalformedRecord,
    MissingClass,
    UnknownLabel,
)
from chronotext.naive_bayes import (
    NaiveBayesModel,
    TokenizerConfig,
    load_model,
    log_posterior,
    posterior,
    predict,
    save_model,
    tokenize,
    train,
)

import oracles

D1960 = decode_decade("6")
D1970 = decode_decade("7")


def _two_class_model(alpha: float = 1.0) -> NaiveBayesModel:
    docs = [(["x", "x", "y"], D1960), (["y", "y"], D1970)]
    return train(docs, alpha=alpha)


def test_tokenize_splits_letter_digit_runs() -> None:
    assert tokenize("The cat, the hat!") == ["the", "cat", "the", "hat"]
    assert tokenize("in 1988") == ["in", "1988"]
    assert tokenize("a_b c-d") == ["a", "b", "c", "d"]


def test_tokenize_flags() -> None:
    config = TokenizerConfig(lowercase=False)
    assert tokenize("The Cat", config) == ["The", "Cat"]
    config = TokenizerConfig(keep_numbers=False)
    assert tokenize("in 1988 again", config) == ["in", "again"]


def test_trained_probabilities_match_hand_computation() -> None:
    # alpha=1, V={x,y}: P(x|A)=(2+1)/(3+2), P(y|A)=(1+1)/(3+2),
    # P(x|B)=(0+1)/(2+2), P(y|B)=(2+1)/(2+2); priors 1/2 each.
    model = _two_class_model()
    assert model.classes == (D1960, D1970)
    assert model.vocabulary == ("x", "y")
    lik_a, lik_b = model.log_likelihoods
    assert math.exp(lik_a["x"]) == pytest.approx(0.6, rel=1e-12)
    assert math.exp(lik_a["y"]) == pytest.approx(0.4, rel=1e-12)
    assert math.exp(lik_b["x"]) == pytest.approx(0.25, rel=1e-12)
    assert math.exp(lik_b["y"]) == pytest.approx(0.75, rel=1e-12)
    for lp in model.log_priors:
        assert math.exp(lp) == pytest.approx(0.5, rel=1e-12)


def test_posterior_single_token_hand_value() -> None:
    # P(A|x) = 0.5*0.6 / (0.5*0.6 + 0.5*0.25) = 0.3/0.425 = 12/17.
    model = _two_class_model()
    probs = posterior(model, ["x"])
    assert probs[0] == pytest.approx(12 / 17, rel=1e-12)
    assert sum(probs) == pytest.approx(1.0, rel=1e-12)


def test_single_class_single_doc_prior_is_one() -> None:
    model = train([(["hello"], D1960)])
    assert model.log_priors == (0.0,)


def test_alpha_validation() -> None:
    docs = [(["x"], D1960)]
    for alpha in (0.0, -1.0, float("nan")):
        with pytest.raises(InvalidAlpha):
            train(docs, alpha=alpha)


def test_missing_class_when_class_list_given() -> None:
    docs = [(["x"], D1960)]
    with pytest.raises(MissingClass):
        train(docs, classes=ALL_DECADES)
    with pytest.raises(MissingClass):
        train([], alpha=1.0)


def test_label_outside_class_list() -> None:
    docs = [(["x"], D1960), (["y"], D1970)]
    with pytest.raises(UnknownLabel):
        train(docs, classes=(D1960,))


def test_oov_tokens_do_not_change_scores() -> None:
    model = _two_class_model()
    assert log_posterior(model, ["x", "zzz"]) == log_posterior(model, ["x"])


def test_empty_document_scores_prior_argmax() -> None:
    docs = [(["x"], D1960), (["y"], D1970), (["z"], D1970)]
    model = train(docs)
    assert predict(model, []) == D1970


def test_exact_tie_breaks_to_earliest_decade() -> None:
    docs = [(["x", "y"], D1960), (["x", "y"], D1970)]
    model = train(docs)
    assert predict(model, ["x", "y"]) == D1960
    assert predict(model, []) == D1960


def test_probability_tables_are_normalized() -> None:
    rng = random.Random(412)
    vocab = [f"w{i}" for i in range(30)]
    for _ in range(50):
        n_classes = rng.randrange(2, 7)
        classes = ALL_DECADES[:n_classes]
        docs = []
        for c in classes:
            for _ in range(rng.randrange(1, 5)):
                docs.append(
                    (
                        [rng.choice(vocab) for _ in range(rng.randrange(0, 20))],
                        c,
                    )
                )
        model = train(docs, alpha=rng.choice([0.5, 1.0, 2.0]))
        assert math.fsum(math.exp(lp) for lp in model.log_priors) == pytest.approx(
            1.0, abs=1e-12
        )
        for lik in model.log_likelihoods:
            if model.vocabulary:
                assert math.fsum(
                    math.exp(lik[t]) for t in model.vocabulary
                ) == pytest.approx(1.0, abs=1e-12)
            for value in lik.values():
                assert math.isfinite(value) and value <= 0.0


def test_matches_exact_fraction_oracle_small_case() -> None:
    docs = [(["x", "x", "y"], D1960), (["y", "y"], D1970)]
    model = train(docs, alpha=0.5)
    query = ["x", "y", "y"]
    want = oracles.nb_exact_posteriors(
        [(t, 0 if c == D1960 else 1) for t, c in docs], Fraction(1, 2), query
    )
    got = posterior(model, query)
    for g, w in zip(got, want):
        assert g == pytest.approx(float(w), abs=1e-12)


def test_save_load_round_trip(tmp_path: Path) -> None:
    model = _two_class_model(alpha=0.5)
    path = tmp_path / "nb.model"
    save_model(model, path)
    loaded = load_model(path)
    assert loaded.alpha == model.alpha
    assert loaded.classes == model.classes
    assert loaded.vocabulary == model.vocabulary
    assert loaded.log_priors == model.log_priors
    assert loaded.log_likelihoods == model.log_likelihoods
    assert loaded.tokenizer == model.tokenizer
    resaved = tmp_path / "nb2.model"
    save_model(loaded, resaved)
    assert resaved.read_bytes() == path.read_bytes()


def test_saved_model_predicts_identically(tmp_path: Path) -> None:
    rng = random.Random(2024)
    vocab = [f"w{i}" for i in range(40)]
    docs = []
    for c in ALL_DECADES:
        for _ in range(4):
            docs.append(
                ([rng.choice(vocab) for _ in range(rng.randrange(1, 30))], c)
            )
    model = train(docs, classes=ALL_DECADES)
    path = tmp_path / "nb.model"
    save_model(model, path)
    loaded = load_model(path)
    for _ in range(50):
        tokens = [rng.choice(vocab) for _ in range(rng.randrange(0, 25))]
        assert predict(loaded, tokens) == predict(model, tokens)
        assert log_posterior(loaded, tokens) == log_posterior(model, tokens)


def test_load_rejects_garbage(tmp_path: Path) -> None:
    path = tmp_path / "bad.model"
    path.write_text("not a model\n", encoding="utf-8")
    with pytest.raises(MalformedRecord):
        load_model(path)
    path.write_text("chronotext-nb 1\nwhatever\tx\n", encoding="utf-8")
    with pytest.raises(MalformedRecord):
        load_model(path)
    path.write_text("chronotext-nb 1\nalpha\t1.0\n", encoding="utf-8")
    with pytest.raises(MalformedRecord):
        load_model(path)


def test_model_file_is_tab_separated_rows(tmp_path: Path) -> None:
    model = _two_class_model()
    path = tmp_path / "nb.model"
    save_model(model, path)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "chronotext-nb 1"
    lik_lines = [l for l in lines if l.startswith("lik\t")]
    # one row per (class, token)
    assert len(lik_lines) == 2 * 2
    for line in lik_lines:
        kind, code, token, value = line.split("\t")
        assert decode_decade(code) in model.classes
        assert token in model.vocabulary
        float(value)
