"""Acceptance gate: end-to-end guarantees the package must keep.

Each test prints one ``[acceptance] <name>: PASS|FAIL`` line through the
capture-disabled channel so the verdicts stay visible in any pytest run.
All randomness is seeded, so every run checks the identical case family.
"""

from __future__ import annotations

import json
import math
import random
import shutil
import time
from fractions import Fraction
from pathlib import Path

import pytest

from chronotext.cleaning import (
    normalize_ws,
    strip_boilerplate,
    strip_publication_date,
    strip_years,
    truncate_words,
    word_count,
)
from chronotext.cli import main
from chronotext.corpus import ALL_DECADES, encode_decade
from chronotext.evaluation import (
    ScoreVector,
    accuracy,
    confusion_matrix,
    cross_entropy_loss,
    per_class_accuracy,
)
from chronotext.naive_bayes import posterior, predict, train
from chronotext.stats import length_stats
from chronotext.stratify import export_tsv, read_tsv
from chronotext.corpus import CorpusManifest, ManifestRow

import oracles
import synth


def _verdict(capsys: pytest.CaptureFixture, name: str,
             failures: list[str]) -> None:
    with capsys.disabled():
        print(f"[acceptance] {name}: {'FAIL' if failures else 'PASS'}")
    assert not failures, f"{name}: {failures[:5]}"


def test_classifier_matches_exact_probability_oracle(
    capsys: pytest.CaptureFixture,
) -> None:
    started = time.monotonic()
    rng = random.Random(73001)
    failures: list[str] = []
    for trial in range(600):
        n_classes = rng.choice([2, 3])
        classes = tuple(sorted(rng.sample(ALL_DECADES, n_classes)))
        vocab = [f"w{i}" for i in range(rng.randint(1, 10))]
        n_docs = rng.randint(n_classes, 8)
        docs = []
        for d in range(n_docs):
            label_i = d if d < n_classes else rng.randrange(n_classes)
            tokens = [rng.choice(vocab) for _ in range(rng.randint(0, 6))]
            docs.append((tokens, label_i))
        alpha = rng.choice([Fraction(1, 2), Fraction(1), Fraction(2)])

        model = train(
            [(tokens, classes[i]) for tokens, i in docs],
            alpha=float(alpha),
            classes=classes,
        )
        query = [
            rng.choice(vocab) if rng.random() < 0.8 else f"oov{rng.randrange(3)}"
            for _ in range(rng.randint(0, 8))
        ]
        expected = oracles.nb_exact_posteriors(docs, alpha, query)
        got = posterior(model, query)
        for c in range(n_classes):
            if abs(got[c] - float(expected[c])) > 1e-9:
                failures.append(
                    f"trial {trial} class {c}: {got[c]} vs {float(expected[c])}"
                )
        optimal = {classes[i] for i in oracles.nb_optimal_set(expected)}
        got_label = predict(model, query)
        if got_label not in optimal:
            failures.append(
                f"trial {trial}: predicted {got_label.name}, "
                f"oracle allows {sorted(c.name for c in optimal)}"
            )
    elapsed = time.monotonic() - started
    if elapsed >= 60:
        failures.append(f"took {elapsed:.1f}s, budget 60s")
    _verdict(capsys, "naive-bayes probability oracle", failures)


def test_synthetic_decade_corpus_accuracy(
    capsys: pytest.CaptureFixture, tmp_path: Path
) -> None:
    started = time.monotonic()
    rng = random.Random(20260816)
    articles = synth.marker_articles(rng, docs_per_decade=500)
    manifest, texts = synth.write_corpus(tmp_path / "src", articles)
    failures: list[str] = []

    assert main([
        "split", "--manifest", str(manifest),
        "--out-train", str(tmp_path / "train.csv"),
        "--out-test", str(tmp_path / "test.csv"),
        "--fraction", "0.716", "--seed", "42",
    ]) == 0
    for name in ("train", "test"):
        assert main([
            "export-tsv", "--manifest", str(tmp_path / f"{name}.csv"),
            "--text-dir", str(texts), "--out", str(tmp_path / f"{name}.tsv"),
        ]) == 0
    assert main([
        "train-nb", "--in", str(tmp_path / "train.tsv"),
        "--model", str(tmp_path / "nb.model"), "--alpha", "1.0",
    ]) == 0
    assert main([
        "predict", "--model", str(tmp_path / "nb.model"),
        "--in", str(tmp_path / "test.tsv"), "--out", str(tmp_path / "preds.csv"),
    ]) == 0
    assert main([
        "evaluate", "--preds", str(tmp_path / "preds.csv"),
        "--out", str(tmp_path / "report.json"),
    ]) == 0

    report = json.loads((tmp_path / "report.json").read_text("utf-8"))
    if report["n"] != 3000 - 6 * round(0.716 * 500):
        failures.append(f"unexpected test-set size {report['n']}")
    if report["overall_accuracy"] < 0.90:
        failures.append(f"accuracy {report['overall_accuracy']:.4f} < 0.90")
    elapsed = time.monotonic() - started
    if elapsed >= 60:
        failures.append(f"took {elapsed:.1f}s, budget 60s")
    _verdict(capsys, "synthetic decade corpus accuracy", failures)


def test_cleaning_exactness_and_idempotence(
    capsys: pytest.CaptureFixture,
) -> None:
    started = time.monotonic()
    rng = random.Random(4101)
    failures: list[str] = []
    for trial in range(1000):
        text, n_boiler, n_dates, n_years = synth.noisy_doc(rng)

        for op in (strip_boilerplate, strip_publication_date, strip_years):
            once, _ = op(text)
            twice, again = op(once)
            if twice != once or again != 0:
                failures.append(f"trial {trial}: {op.__name__} not idempotent")

        step1, got_boiler = strip_boilerplate(text)
        step2, got_dates = strip_publication_date(step1)
        step3, got_years = strip_years(step2)
        if (got_boiler, got_dates, got_years) != (n_boiler, n_dates, n_years):
            failures.append(
                f"trial {trial}: counts {(got_boiler, got_dates, got_years)}"
                f" != seeded {(n_boiler, n_dates, n_years)}"
            )
        for op in (strip_boilerplate, strip_publication_date, strip_years):
            residue, n = op(step3)
            if n != 0 or residue != step3:
                failures.append(f"trial {trial}: residual {op.__name__} match")

        limit = rng.randint(1, 40)
        cut, _ = truncate_words(step3, limit)
        cut_again, more = truncate_words(cut, limit)
        if cut_again != cut or more != 0 or word_count(cut) > limit:
            failures.append(f"trial {trial}: truncation unstable")
        if len(failures) > 10:
            break
    elapsed = time.monotonic() - started
    if elapsed >= 30:
        failures.append(f"took {elapsed:.1f}s, budget 30s")
    _verdict(capsys, "cleaning exactness and idempotence", failures)


def test_length_stats_oracle_and_uniform_truncation(
    capsys: pytest.CaptureFixture, tmp_path: Path
) -> None:
    rng = random.Random(88111)
    failures: list[str] = []
    for trial in range(1000):
        counts = [rng.randint(0, 400) for _ in range(rng.randint(1, 60))]
        got = length_stats(counts)
        want = oracles.stats_by_sorting(counts)
        if (got.min, got.max) != (want["min"], want["max"]):
            failures.append(f"trial {trial}: min/max")
        if got.median != want["median"]:
            failures.append(f"trial {trial}: median")
        if not math.isclose(got.mean, want["mean"], rel_tol=1e-9):
            failures.append(f"trial {trial}: mean")
        if not math.isclose(got.std, want["std"], rel_tol=1e-9, abs_tol=1e-12):
            failures.append(f"trial {trial}: std")

    articles = []
    for decade in range(1960, 2020, 10):
        for i in range(10):
            articles.append((
                f"{decade}-{i:02d}", decade + 4, 6, "Sports",
                synth.marker_doc(rng, decade, length=rng.randrange(3, 90)),
            ))
    manifest, texts = synth.write_corpus(tmp_path / "src", articles)
    assert main([
        "export-tsv", "--manifest", str(manifest), "--text-dir", str(texts),
        "--out", str(tmp_path / "all.tsv"),
    ]) == 0
    assert main([
        "ablate", "--train", str(tmp_path / "all.tsv"),
        "--out-dir", str(tmp_path / "variants"), "--uniform-length",
    ]) == 0
    run = json.loads((tmp_path / "variants" / "run.json").read_text("utf-8"))
    limit = run["config"]["resolved_uniform_limit"]
    rows = read_tsv(tmp_path / "all.tsv")
    want_limit = max(1, round(sum(word_count(r.text) for r in rows) / len(rows)))
    if limit != want_limit:
        failures.append(f"limit {limit} != train-mean {want_limit}")
    uniform = read_tsv(tmp_path / "variants" / "all_uniform.tsv")
    worst = max(word_count(r.text) for r in uniform)
    if worst > limit:
        failures.append(f"row with {worst} tokens exceeds limit {limit}")
    _verdict(capsys, "length stats oracle and uniform truncation", failures)


def test_cross_entropy_identities(capsys: pytest.CaptureFixture) -> None:
    rng = random.Random(5150)
    failures: list[str] = []

    for _ in range(50):
        base = rng.uniform(-50.0, 50.0)
        for true_index in range(6):
            loss = cross_entropy_loss(ScoreVector((base,) * 6, true_index))
            if not math.isclose(loss, math.log(6), rel_tol=1e-9):
                failures.append(f"uniform loss {loss} != ln 6")

    for trial in range(300):
        scores = tuple(rng.uniform(-30.0, 30.0) for _ in range(6))
        true_index = rng.randrange(6)
        ref = cross_entropy_loss(ScoreVector(scores, true_index))
        shift = rng.uniform(-100.0, 100.0)
        moved = cross_entropy_loss(
            ScoreVector(tuple(s + shift for s in scores), true_index)
        )
        if abs(moved - ref) > 1e-12:
            failures.append(f"trial {trial}: shift {shift} moved loss {moved - ref}")
        # abs_tol floor: near-zero losses cancel to ~1e-16 in any float
        # evaluation, where relative agreement is unobtainable.
        exact = float(oracles.xent_decimal(list(scores), true_index))
        if not math.isclose(ref, exact, rel_tol=1e-9, abs_tol=1e-12):
            failures.append(f"trial {trial}: {ref} vs decimal {exact}")

    for trial in range(10_000):
        n = rng.randint(1, 8)
        scores = tuple(rng.uniform(-40.0, 40.0) for _ in range(n))
        loss = cross_entropy_loss(ScoreVector(scores, rng.randrange(n)))
        if loss < 0.0:
            failures.append(f"trial {trial}: negative loss {loss}")
    _verdict(capsys, "cross-entropy identities", failures)


def test_evaluation_algebra_and_tsv_round_trip(
    capsys: pytest.CaptureFixture, tmp_path: Path
) -> None:
    rng = random.Random(31337)
    failures: list[str] = []
    for trial in range(1000):
        pairs = [
            (rng.choice(ALL_DECADES), rng.choice(ALL_DECADES))
            for _ in range(rng.randint(1, 60))
        ]
        cm = confusion_matrix(pairs)
        overall = accuracy(cm)
        trace = sum(cm.counts[i][i] for i in range(len(cm.classes)))
        if abs(overall - trace / cm.total) > 1e-12:
            failures.append(f"trial {trial}: trace/total mismatch")
        per_class = per_class_accuracy(cm)
        weighted = math.fsum(
            acc * cm.row_sum(cm.classes.index(c)) for c, acc in per_class.items()
        ) / cm.total
        if abs(weighted - overall) > 1e-12:
            failures.append(f"trial {trial}: support-weighted mean mismatch")

    rows = []
    texts = {}
    for i in range(100):
        year = 1960 + rng.randrange(60)
        id_ = f"rt-{i:03d}"
        rows.append(ManifestRow(id_, year, rng.randint(1, 12), "Sports, etc."))
        texts[id_] = (
            f"lead {i},\twith tab\nand newline, plus trailing, commas\t"
            + synth.marker_doc(rng, year // 10 * 10, length=8)
        )
    manifest = CorpusManifest(tuple(rows))
    first = tmp_path / "round.tsv"
    export_tsv(manifest, texts, first)
    back = read_tsv(first)
    if [r.id for r in back] != [r.id for r in rows]:
        failures.append("id order changed through export/import")
    for row, original in zip(back, rows):
        if row.label != original.decade:
            failures.append(f"{row.id}: label changed")
        if row.category != normalize_ws(original.raw_category):
            failures.append(f"{row.id}: category changed")
        if row.text != normalize_ws(texts[original.id]):
            failures.append(f"{row.id}: text changed beyond ws normalization")
    second = tmp_path / "round2.tsv"
    export_tsv(manifest, {r.id: r.text for r in back}, second)
    if first.read_bytes() != second.read_bytes():
        failures.append("re-export of imported rows is not byte-identical")
    _verdict(capsys, "evaluation algebra and TSV round-trip", failures)


def test_pipeline_rerun_determinism(
    capsys: pytest.CaptureFixture, tmp_path: Path
) -> None:
    rng = random.Random(60321)
    articles = synth.marker_articles(rng, docs_per_decade=20)
    manifest, texts = synth.write_corpus(tmp_path / "src", articles)
    out = tmp_path / "out"

    argvs = [
        ["split", "--manifest", str(manifest),
         "--out-train", str(out / "split" / "train.csv"),
         "--out-test", str(out / "split" / "test.csv"),
         "--fraction", "0.716", "--seed", "42"],
        ["export-tsv", "--manifest", str(out / "split" / "train.csv"),
         "--text-dir", str(texts), "--out", str(out / "tsv" / "train.tsv")],
        ["export-tsv", "--manifest", str(out / "split" / "test.csv"),
         "--text-dir", str(texts), "--out", str(out / "tsv" / "test.tsv")],
        ["train-nb", "--in", str(out / "tsv" / "train.tsv"),
         "--model", str(out / "model" / "nb.model"), "--alpha", "1.0"],
        ["predict", "--model", str(out / "model" / "nb.model"),
         "--in", str(out / "tsv" / "test.tsv"),
         "--out", str(out / "preds" / "preds.csv")],
        ["evaluate", "--preds", str(out / "preds" / "preds.csv"),
         "--manifest", str(manifest), "--by-category",
         "--heatmap", str(out / "eval" / "confusion.svg"),
         "--errors", "5", "--model", str(out / "model" / "nb.model"),
         "--tsv", str(out / "tsv" / "test.tsv"),
         "--out", str(out / "eval" / "report.json")],
        ["stats", "--manifest", str(manifest), "--text-dir", str(texts),
         "--out-dir", str(out / "stats")],
        ["ablate", "--train", str(out / "tsv" / "train.tsv"),
         "--test", str(out / "tsv" / "test.tsv"),
         "--out-dir", str(out / "ablate"),
         "--strip-years", "--uniform-length"],
    ]

    def run_all() -> dict[str, bytes]:
        for argv in argvs:
            assert main(argv) == 0, argv[0]
        return {
            str(p.relative_to(out)): p.read_bytes()
            for p in sorted(out.rglob("*"))
            if p.is_file()
        }

    first = run_all()
    shutil.rmtree(out)
    second = run_all()

    failures: list[str] = []
    if first.keys() != second.keys():
        failures.append(
            f"file sets differ: {sorted(set(first) ^ set(second))[:4]}"
        )
    for name in sorted(first.keys() & second.keys()):
        if first[name] != second[name]:
            failures.append(f"{name} differs between identical reruns")
    if len(first) < 15:
        failures.append(f"pipeline produced only {len(first)} files")
    _verdict(capsys, "pipeline rerun determinism", failures)
