"""Command line interface.

Exit codes: 0 success, 1 data errors (raised as ChronotextError), 2 usage
errors. Every run writes a run.json echoing the effective configuration
next to its primary output, so a run can be reproduced from its outputs
alone. Reruns with identical arguments and inputs produce byte-identical
outputs; all randomness is owned by --seed.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import cleaning, evaluation, ingestion, naive_bayes, stats, stratify
from .corpus import (
    ALL_DECADES,
    DECADE_STARTS,
    CorpusManifest,
    load_manifest,
    load_texts,
    save_manifest,
    write_raw_article,
)
from .errors import AuthError, ChronotextError


class UsageError(Exception):
    """Bad flag combinations that argparse alone cannot express."""


def _fraction(value: str) -> float:
    try:
        f = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {value!r}") from None
    if not 0.0 < f < 1.0:
        raise argparse.ArgumentTypeError(f"fraction {f} outside (0, 1)")
    return f


def _decade(value: str) -> int:
    try:
        d = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a year: {value!r}") from None
    if d not in DECADE_STARTS:
        raise argparse.ArgumentTypeError(
            f"no decade starts at {d}; choose from "
            + ", ".join(str(x) for x in DECADE_STARTS)
        )
    return d


def _positive(value: str) -> int:
    try:
        n = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {value!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {n}")
    return n


def _nonnegative(value: str) -> int:
    try:
        n = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {value!r}") from None
    if n < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {n}")
    return n


def _write_run_json(run_dir: Path, command: str, args: argparse.Namespace,
                    extra: dict | None = None) -> None:
    config = {}
    for key, value in vars(args).items():
        if key in ("func", "command", "verbose"):
            continue
        if key == "api_key":
            value = "<redacted>" if value else None
        config[key] = value
    if extra:
        config.update(extra)
    run_dir.mkdir(parents=True, exist_ok=True)
    payload = {"command": command, "config": config}
    (run_dir / "run.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
        newline="\n",
    )


def _mapping_from(args: argparse.Namespace) -> stratify.CategoryMapping:
    if getattr(args, "mapping", None):
        return stratify.load_mapping(args.mapping)
    return stratify.CategoryMapping()


def _tsv_texts(rows: list[stratify.TsvRow]) -> dict[str, str]:
    return {row.id: row.text for row in rows}


def cmd_ingest(args: argparse.Namespace) -> int:
    api_key = args.api_key or os.environ.get(ingestion.API_KEY_ENV, "")
    if not api_key:
        raise AuthError(
            f"no API key: pass --api-key or set {ingestion.API_KEY_ENV}"
        )
    policy = ingestion.FetchPolicy(
        delay_ms=args.delay_ms,
        max_retries=args.max_retries,
        timeout_ms=args.timeout_ms,
    )
    client = ingestion.ArchiveClient(ingestion.UrllibTransport(), policy)
    refs = [
        ingestion.MonthRef(year, month)
        for year in range(args.from_year, args.to_year + 1)
        for month in range(1, 13)
    ]
    out_dir = Path(args.out_dir)
    summary = ingestion.ingest_months(
        client, refs, api_key, out_dir, base_url=args.base_url
    )
    _write_run_json(out_dir, "ingest", args)
    print(
        f"ingested {summary.ok} articles "
        f"({summary.fetch_failed} fetch failures, "
        f"{summary.extract_failed} extract failures)"
    )
    return 0


def cmd_clean(args: argparse.Namespace) -> int:
    manifest = load_manifest(args.manifest)
    texts = load_texts(manifest, args.text_dir)
    rules = cleaning.load_rules(args.rules) if args.rules else None
    out_dir = Path(args.out_dir)
    report_rows = []
    kept = []
    for row in manifest.rows:
        text, report = cleaning.clean_article(texts[row.id], rules)
        years_removed = 0
        if args.strip_years:
            text, years_removed = cleaning.strip_years(text)
        words_truncated = 0
        if args.truncate is not None:
            text, words_truncated = cleaning.truncate_words(text, args.truncate)
        report_rows.append(
            (
                row.id,
                report.boilerplate_removed,
                report.dates_removed,
                years_removed,
                words_truncated,
                "kept" if text else "dropped_empty",
            )
        )
        if not text:
            continue
        kept.append(row)
        write_raw_article(out_dir / "texts", row.id, row.decade, text)
    cleaned = CorpusManifest(tuple(kept), source_path=str(args.manifest))
    save_manifest(cleaned, out_dir / "manifest.csv")
    import csv

    with (out_dir / "cleaning_report.csv").open(
        "w", newline="", encoding="utf-8"
    ) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["id", "boilerplate_removed", "dates_removed", "years_removed",
             "words_truncated", "outcome"]
        )
        writer.writerows(report_rows)
    _write_run_json(out_dir, "clean", args)
    dropped = len(manifest) - len(cleaned)
    print(f"cleaned {len(cleaned)} articles ({dropped} empty after cleaning)")
    return 0


def cmd_merge(args: argparse.Namespace) -> int:
    merged = ingestion.merge_chunks(list(args.chunks))
    save_manifest(merged, args.out)
    _write_run_json(Path(args.out).parent, "merge", args)
    print(f"merged {len(args.chunks)} chunks into {len(merged)} articles")
    return 0


def cmd_filter(args: argparse.Namespace) -> int:
    manifest = load_manifest(args.manifest)
    mapping = _mapping_from(args)
    filtered = stratify.filter_corpus(
        manifest,
        mapping,
        decades=set(args.decade) if args.decade else None,
        groups=set(args.group) if args.group else None,
    )
    save_manifest(filtered, args.out)
    _write_run_json(Path(args.out).parent, "filter", args)
    print(f"kept {len(filtered)} of {len(manifest)} articles")
    return 0


def cmd_split(args: argparse.Namespace) -> int:
    manifest = load_manifest(args.manifest)
    if args.sample_n is not None:
        manifest = stratify.sample_manifest(manifest, args.sample_n, args.seed)
    spec = stratify.SplitSpec(
        train_fraction=args.fraction, seed=args.seed, stratify_by=args.stratify
    )
    train, test = stratify.train_test_split(manifest, spec)
    save_manifest(train, args.out_train)
    save_manifest(test, args.out_test)
    _write_run_json(Path(args.out_train).parent, "split", args)
    print(f"split {len(manifest)} articles into {len(train)} train / {len(test)} test")
    return 0


def cmd_export_tsv(args: argparse.Namespace) -> int:
    manifest = load_manifest(args.manifest)
    texts = load_texts(manifest, args.text_dir)
    stratify.export_tsv(manifest, texts, args.out)
    _write_run_json(Path(args.out).parent, "export-tsv", args)
    print(f"exported {len(manifest)} rows to {args.out}")
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    manifest = load_manifest(args.manifest)
    texts = load_texts(manifest, args.text_dir)
    # Counts describe the cleaned corpus: base cleaning runs first.
    cleaned = {
        id_: cleaning.clean_article(text)[0] for id_, text in texts.items()
    }
    table = stats.decade_stats(manifest, cleaned)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stats.write_stats_csv(table, out_dir / "stats.csv")
    stats.write_stats_svg(table, out_dir / "stats.svg")
    _write_run_json(
        out_dir, "stats", args,
        extra={"word_counts": "whitespace tokens after base cleaning"},
    )
    for decade in sorted(table):
        s = table[decade]
        print(
            f"{decade}s: n={s.n} min={s.min} max={s.max} "
            f"mean={s.mean:.1f} median={s.median:.1f} std={s.std:.1f}"
        )
    return 0


def cmd_train_nb(args: argparse.Namespace) -> int:
    rows = stratify.read_tsv(args.train)
    config = naive_bayes.TokenizerConfig(
        lowercase=not args.no_lowercase, keep_numbers=not args.drop_numbers
    )
    docs = [
        (naive_bayes.tokenize(row.text, config), row.label) for row in rows
    ]
    model = naive_bayes.train(
        docs, alpha=args.alpha, classes=ALL_DECADES, tokenizer=config
    )
    naive_bayes.save_model(model, args.model)
    _write_run_json(Path(args.model).parent, "train-nb", args)
    print(
        f"trained on {len(docs)} documents, vocabulary {len(model.vocabulary)}, "
        f"alpha {model.alpha}"
    )
    return 0


def cmd_predict(args: argparse.Namespace) -> int:
    model = naive_bayes.load_model(args.model)
    rows = stratify.read_tsv(args.input)
    preds = [
        (
            row.id,
            row.label,
            naive_bayes.predict(
                model, naive_bayes.tokenize(row.text, model.tokenizer)
            ),
        )
        for row in rows
    ]
    evaluation.write_predictions(preds, args.out)
    _write_run_json(Path(args.out).parent, "predict", args)
    print(f"predicted {len(preds)} documents")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    preds = evaluation.read_predictions(args.preds)
    pairs = [(true, pred) for _, true, pred in preds]
    cm = evaluation.confusion_matrix(pairs)
    overall = evaluation.accuracy(cm)
    per_decade = evaluation.per_class_accuracy(cm)
    report: dict = {
        "n": len(preds),
        "overall_accuracy": overall,
        "per_decade_accuracy": {c.name: acc for c, acc in per_decade.items()},
        "confusion": {
            "classes": [c.name for c in cm.classes],
            "counts": [list(row) for row in cm.counts],
        },
    }
    print(f"overall accuracy: {100 * overall:.2f}% ({len(preds)} articles)")
    for c, acc in per_decade.items():
        print(f"  {c.name}: {100 * acc:.2f}%")
    if args.by_category:
        if not args.manifest:
            raise UsageError("--by-category needs --manifest for the join")
        manifest = load_manifest(args.manifest)
        mapping = _mapping_from(args)
        groups = {
            row.id: mapping.map_category(row.raw_category)
            for row in manifest.rows
        }
        by_cat = evaluation.per_category_accuracy(preds, groups)
        report["per_category_accuracy"] = by_cat
        for group, acc in by_cat.items():
            print(f"  {group}: {100 * acc:.2f}%")
    if args.heatmap:
        evaluation.write_heatmap_svg(cm, args.heatmap)
    if args.errors:
        if not args.model or not args.tsv:
            raise UsageError("--errors needs --model and --tsv for the texts")
        model = naive_bayes.load_model(args.model)
        texts = _tsv_texts(stratify.read_tsv(args.tsv))
        cases = evaluation.error_report(model, preds, texts, args.errors)
        report["errors"] = [
            {
                "id": case.id,
                "true": case.true.name,
                "pred": case.pred.name,
                "top_tokens": [[t, v] for t, v in case.top_tokens],
            }
            for case in cases
        ]
        print(f"  {len(cases)} misclassified articles in the error report")
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(
            json.dumps(report, indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
            newline="\n",
        )
    run_dir = Path(args.out).parent if args.out else Path(args.preds).parent
    _write_run_json(run_dir, "evaluate", args)
    return 0


def cmd_ablate(args: argparse.Namespace) -> int:
    if not args.strip_years and args.uniform_length is None:
        raise UsageError(
            "nothing to do: pass --strip-years and/or --uniform-length"
        )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    train_rows = stratify.read_tsv(args.train)
    test_rows = stratify.read_tsv(args.test) if args.test else []

    def _write_variant(rows: list[stratify.TsvRow], stem: str, suffix: str,
                       transform) -> None:
        out_rows = []
        for row in rows:
            out_rows.append((row.id, row.label, row.category, transform(row.text)))
        path = out_dir / f"{stem}_{suffix}.tsv"
        lines = ["\t".join(stratify.TSV_HEADER)]
        lines += [
            "\t".join((id_, label.code, category, text))
            for id_, label, category, text in out_rows
        ]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")

    sources = [(train_rows, Path(args.train).stem)]
    if args.test:
        sources.append((test_rows, Path(args.test).stem))

    resolved_limit = None
    if args.strip_years:
        for rows, stem in sources:
            _write_variant(
                rows, stem, "years_removed",
                lambda t: cleaning.strip_years(t)[0],
            )
    if args.uniform_length is not None:
        resolved_limit = args.uniform_length
        if resolved_limit == 0:
            mean_tokens = (
                sum(cleaning.word_count(r.text) for r in train_rows)
                / len(train_rows)
            )
            resolved_limit = max(1, round(mean_tokens))
        for rows, stem in sources:
            _write_variant(
                rows, stem, "uniform",
                lambda t: cleaning.truncate_words(t, resolved_limit)[0],
            )
    _write_run_json(
        out_dir, "ablate", args, extra={"resolved_uniform_limit": resolved_limit}
    )
    done = []
    if args.strip_years:
        done.append("years_removed")
    if args.uniform_length is not None:
        done.append(f"uniform(limit={resolved_limit})")
    print(f"wrote {', '.join(done)} variants for {len(sources)} file(s)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chronotext",
        description="Decade-labelled news corpus tooling and baselines.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="fetch and scrape archive months")
    p.add_argument("--from-year", type=int, required=True)
    p.add_argument("--to-year", type=int, required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--api-key", default=None)
    p.add_argument("--base-url", default=ingestion.DEFAULT_BASE_URL)
    p.add_argument("--delay-ms", type=int, default=12000)
    p.add_argument("--max-retries", type=int, default=3)
    p.add_argument("--timeout-ms", type=int, default=30000)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("clean", help="strip boilerplate and dates")
    p.add_argument("--manifest", required=True)
    p.add_argument("--text-dir", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--rules", default=None, help="extra boilerplate phrases")
    p.add_argument("--strip-years", action="store_true")
    p.add_argument("--truncate", type=_positive, default=None, metavar="N")
    p.set_defaults(func=cmd_clean)

    p = sub.add_parser("merge", help="union chunk manifests by (year, month, id)")
    p.add_argument("chunks", nargs="+", metavar="MANIFEST_CSV")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_merge)

    p = sub.add_parser("filter", help="subset a manifest by decade/group")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--decade", action="append", type=_decade, default=None)
    p.add_argument("--group", action="append", default=None)
    p.add_argument("--mapping", default=None)
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("split", help="seeded stratified train/test split")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out-train", required=True)
    p.add_argument("--out-test", required=True)
    p.add_argument("--fraction", type=_fraction, default=0.716)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--stratify", choices=("decade", "none"), default="decade")
    p.add_argument("--sample-n", type=_positive, default=None,
                   help="subsample this many rows before splitting")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("export-tsv", help="write id/label/category/text rows")
    p.add_argument("--manifest", required=True)
    p.add_argument("--text-dir", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_tsv)

    p = sub.add_parser("stats", help="per-decade word count statistics")
    p.add_argument("--manifest", required=True)
    p.add_argument("--text-dir", required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("train-nb", help="train the naive Bayes baseline")
    p.add_argument("--in", dest="train", required=True, metavar="TRAIN_TSV")
    p.add_argument("--model", required=True)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--no-lowercase", action="store_true")
    p.add_argument("--drop-numbers", action="store_true")
    p.set_defaults(func=cmd_train_nb)

    p = sub.add_parser("predict", help="label a TSV with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="input", required=True, metavar="TSV")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="score predictions")
    p.add_argument("--preds", required=True)
    p.add_argument("--manifest", default=None)
    p.add_argument("--mapping", default=None)
    p.add_argument("--by-category", action="store_true")
    p.add_argument("--heatmap", default=None, metavar="SVG")
    p.add_argument("--errors", type=_nonnegative, default=0, metavar="K")
    p.add_argument("--model", default=None)
    p.add_argument("--tsv", default=None, help="texts for the error report")
    p.add_argument("--out", default=None, metavar="REPORT_JSON")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("ablate", help="years-removed / uniform-length variants")
    p.add_argument("--train", required=True, metavar="TRAIN_TSV")
    p.add_argument("--test", default=None, metavar="TEST_TSV")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--strip-years", action="store_true")
    p.add_argument("--uniform-length", type=int, nargs="?", const=0,
                   default=None, metavar="N",
                   help="token limit; omit N to use the rounded train mean")
    p.set_defaults(func=cmd_ablate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except ChronotextError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
