"""Batch command-line access to the pipeline.

Subcommands:
  score   score essay files and select evidence-use feedback
  revise  extract/classify revisions between two drafts and select
          revision feedback
  eval    agreement and classifier metrics from prediction/gold files
  stats   corpus statistics over a directory of draft files
  serve   run the REST service

Exit codes: 0 success, 1 domain error, 2 input/format error. Every
command accepts --json for machine-readable output; report commands
accept --csv and --figures to write delimited output and charts.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from .alignment import align, extract_revisions
from .classifiers import baseline_bundle, classify_all
from .embeddings import load_embeddings
from .errors import DomainError, InputFormatError
from .feedback import Thresholds, select_ef, select_rf
from .lexicon import load_article_config
from .metrics import (
    ANNOTATION_COLUMNS,
    EssaySeries,
    classifier_metrics,
    corpus_stats,
    csv_text,
    load_annotations,
    metrics_from_confusion,
    qwk,
    write_csv,
)
from .scoring import ArticleMatcher, score_with_config
from .serialize import (
    decision_to_dict,
    revision_to_annotation_row,
    revision_to_dict,
    score_to_dict,
)
from .textcore import segment

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_FORMAT = 2


def bundled_lexicon_path(article_id: str) -> Path:
    return Path(str(resources.files("revisecoach.data.lexicons") / f"{article_id}.json"))


def bundled_embeddings_path() -> Path:
    return Path(str(resources.files("revisecoach.data.embeddings") / "sample-50d.txt"))


def _resolve_article(args) -> tuple:
    """Article config + embeddings with flag > config file > default
    precedence, recording where each parameter came from."""
    from dataclasses import replace

    from .service.config import ServiceConfig

    service_config = ServiceConfig.load(args.config) if getattr(args, "config", None) else None

    lexicon_path = None
    lexicon_source = "default"
    if args.lexicon:
        lexicon_path = Path(args.lexicon)
        lexicon_source = "flag"
    elif service_config and service_config.lexicon_dir:
        candidate = Path(service_config.lexicon_dir) / "mvp.json"
        if candidate.exists():
            lexicon_path = candidate
            lexicon_source = "config"
    if lexicon_path is None:
        lexicon_path = bundled_lexicon_path("mvp")
    config = load_article_config(lexicon_path)

    trace = {}
    for flag, field in (("threshold", "similarity_threshold"), ("window", "window_size"), ("stride", "stride")):
        value = getattr(args, flag, None)
        if value is not None:
            config = replace(config, **{field: value})
            trace[field] = {"value": value, "source": "flag"}
        else:
            trace[field] = {"value": getattr(config, field), "source": "file"}

    embeddings_source = "default"
    if args.embeddings:
        embeddings_path = Path(args.embeddings)
        embeddings_source = "flag"
    elif service_config and service_config.embeddings_path:
        embeddings_path = Path(service_config.embeddings_path)
        embeddings_source = "config"
    else:
        embeddings_path = bundled_embeddings_path()
    table = load_embeddings(embeddings_path)
    trace["lexicon"] = {"value": str(lexicon_path), "source": lexicon_source}
    trace["embeddings"] = {"value": str(embeddings_path), "source": embeddings_source}
    return config, table, trace


def _print_config_trace(trace: dict) -> None:
    for key in sorted(trace):
        entry = trace[key]
        print(f"# {key} = {entry['value']} ({entry['source']})")


def cmd_score(args) -> int:
    config, table, trace = _resolve_article(args)
    th = Thresholds(config.alpha, config.beta, config.gamma)
    results = []
    for path in sorted(Path(p) for p in args.files):
        text = path.read_text(encoding="utf-8")
        score = score_with_config(segment(text), config, table)
        decision = select_ef(score, th)
        results.append({"file": str(path), "score": score_to_dict(score), "feedback": decision_to_dict(decision)})
    if args.json:
        print(json.dumps({"config": trace, "results": results}, indent=2))
    else:
        _print_config_trace(trace)
        for item in results:
            score = item["score"]
            feedback = item["feedback"]
            print(f"{item['file']}: npe={score['npe']} spc={score['spc']} wc={score['word_count']} -> {feedback['level']}")
            for message in feedback["messages"]:
                print(f"  - {message}")
    if args.csv:
        rows = [["file", "npe", "spc", "word_count", "ef_level"]]
        for item in results:
            rows.append(
                [
                    item["file"],
                    str(item["score"]["npe"]),
                    str(item["score"]["spc"]),
                    str(item["score"]["word_count"]),
                    item["feedback"]["level"],
                ]
            )
        write_csv(rows, args.csv)
    return EXIT_OK


def cmd_revise(args) -> int:
    config, table, trace = _resolve_article(args)
    matcher = ArticleMatcher(config, table)
    th = Thresholds(config.alpha, config.beta, config.gamma)
    old_doc = segment(Path(args.old_file).read_text(encoding="utf-8"))
    new_doc = segment(Path(args.new_file).read_text(encoding="utf-8"))
    old_score = score_with_config(old_doc, config, table)
    new_score = score_with_config(new_doc, config, table)
    prev_ef = args.prev_ef or select_ef(old_score, th).level
    revisions = classify_all(
        extract_revisions(align(old_doc, new_doc)), old_doc, new_doc, matcher,
        baseline_bundle(matcher),
    )
    decision = select_rf(prev_ef, old_score, new_score, revisions, matcher, th)
    payload = {
        "config": trace,
        "prev_ef": prev_ef,
        "old_score": score_to_dict(old_score),
        "new_score": score_to_dict(new_score),
        "revisions": [revision_to_dict(r) for r in revisions],
        "feedback": decision_to_dict(decision),
    }
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        _print_config_trace(trace)
        print(f"previous feedback: {prev_ef}")
        print(f"npe {old_score.npe} -> {new_score.npe}, spc {old_score.spc} -> {new_score.spc}")
        for rev in revisions:
            text = rev.new_text() or rev.old_text() or ""
            labels = "/".join(filter(None, [rev.type_label, rev.er_label, rev.success_label]))
            print(f"  [{rev.action}] {labels or '-'}: {text}")
        print(f"decision: {decision.level}")
        for message in decision.messages:
            print(f"  - {message}")
        for entry in decision.trace:
            print(f"  guard {entry.name}: {entry.passed}")
    if args.csv:
        essay_id = Path(args.new_file).stem
        rows = [list(ANNOTATION_COLUMNS)]
        rows += [revision_to_annotation_row(r, essay_id, "", 1, 2) for r in revisions]
        write_csv(rows, args.csv)
    return EXIT_OK


def _parse_matrix_csv(path: Path) -> list[list[int]]:
    import csv as _csv

    with path.open("r", encoding="utf-8", newline="") as handle:
        rows = [row for row in _csv.reader(handle) if row]
    try:
        return [[int(cell) for cell in row] for row in rows]
    except ValueError as exc:
        raise InputFormatError(f"non-integer matrix cell: {exc}", path=str(path)) from exc


def _scores_column(path: Path, column: str | None) -> list[int]:
    import csv as _csv

    with path.open("r", encoding="utf-8", newline="") as handle:
        reader = _csv.reader(handle)
        rows = [row for row in reader if row]
    if not rows:
        raise InputFormatError("file is empty", path=str(path), line=1)
    header = rows[0]
    index = 0
    start = 0
    if column is not None:
        if column not in header:
            raise InputFormatError(f"column {column!r} not found", path=str(path), line=1)
        index = header.index(column)
        start = 1
    else:
        # Headerless single-column files are accepted as-is.
        try:
            int(header[0])
        except ValueError:
            start = 1
    values = []
    for lineno, row in enumerate(rows[start:], start=start + 1):
        try:
            values.append(int(row[index]))
        except (ValueError, IndexError) as exc:
            raise InputFormatError(f"bad integer value: {exc}", path=str(path), line=lineno) from exc
    return values


def _eval_annotations(args) -> dict:
    pred = load_annotations(args.pred_file)
    gold = load_annotations(args.gold_file)
    pred_by_key = {row.key(): row for row in pred.rows}
    missing = [row.key() for row in gold.rows if row.key() not in pred_by_key]
    if missing:
        raise DomainError(f"predictions missing for {len(missing)} gold rows, first: {missing[0]}")
    reports = {}
    tasks = [
        ("type", gold.rows, "type_label", ("surface", "content"), "content"),
        ("evidence", gold.er_rows(), "er_label", ("evidence", "reasoning"), "evidence"),
        ("success", gold.success_rows(), "success_label", ("successful", "unsuccessful"), "successful"),
    ]
    for name, rows, attr, labels, positive in tasks:
        rows = [r for r in rows if getattr(r, attr)]
        if not rows:
            continue
        gold_labels = [getattr(r, attr) for r in rows]
        pred_labels = [getattr(pred_by_key[r.key()], attr) or "" for r in rows]
        blank = [i for i, p in enumerate(pred_labels) if not p]
        if blank:
            raise DomainError(f"{name}: prediction missing label for gold row {rows[blank[0]].key()}")
        grades = [r.grade for r in rows]
        reports[name] = classifier_metrics(
            pred_labels, gold_labels, positive=positive, grade_of=grades, labels=labels
        )
    return reports


def cmd_eval(args) -> int:
    if args.from_matrix:
        labels = args.labels.split(",") if args.labels else ["surface", "content"]
        report = metrics_from_confusion(
            _parse_matrix_csv(Path(args.from_matrix)), labels, positive=args.positive or labels[-1]
        )
        reports = {"matrix": report}
        qwk_values = {}
    elif args.scores:
        if not args.pred_file or not args.gold_file:
            raise DomainError("eval --scores needs PRED and GOLD files")
        columns = args.column.split(",") if args.column else ["npe", "spc"]
        qwk_values = {}
        for column in columns:
            a = _scores_column(Path(args.pred_file), column)
            b = _scores_column(Path(args.gold_file), column)
            qwk_values[column] = qwk(a, b)
        reports = {}
    else:
        if not args.pred_file or not args.gold_file:
            raise DomainError("eval needs PRED and GOLD files unless --from-matrix is used")
        reports = _eval_annotations(args)
        qwk_values = {}

    if args.json:
        payload = {"qwk": qwk_values}
        for name, report in reports.items():
            payload[name] = {
                "precision": report.precision,
                "recall": report.recall,
                "f1": report.f1,
                "macro_f1": report.macro_f1,
                "accuracy": report.accuracy,
                "n": report.n,
                "labels": list(report.labels),
                "confusion": [list(row) for row in report.confusion],
            }
        print(json.dumps(payload, indent=2))
    else:
        for column, value in qwk_values.items():
            print(f"qwk[{column}] = {value:.4f}")
        for name, report in reports.items():
            print(report.to_text(title=f"== {name} =="))
            print()
    if args.csv:
        rows = []
        for column, value in qwk_values.items():
            rows.append(["qwk", column, f"{value:.6f}"])
        for name, report in reports.items():
            for row in report.to_csv_rows():
                rows.append([name] + row)
        write_csv(rows, args.csv)
    if args.figures:
        from .figures import save_confusion_matrix, save_grade_breakdown

        out = Path(args.figures)
        out.mkdir(parents=True, exist_ok=True)
        for name, report in reports.items():
            save_confusion_matrix(report, out / f"confusion_{name}.png", title=name)
            if report.per_grade:
                save_grade_breakdown(report, out / f"grades_{name}.png", title=name)
    return EXIT_OK


def _load_corpus(corpus_dir: Path) -> list[EssaySeries]:
    if not corpus_dir.is_dir():
        raise InputFormatError("corpus directory not found", path=str(corpus_dir))
    grades: dict[str, str] = {}
    grades_file = corpus_dir / "grades.csv"
    if grades_file.exists():
        import csv as _csv

        with grades_file.open("r", encoding="utf-8", newline="") as handle:
            for lineno, row in enumerate(_csv.reader(handle), start=1):
                if not row or row[0] == "student_id":
                    continue
                if len(row) < 2:
                    raise InputFormatError("expected student_id,grade", path=str(grades_file), line=lineno)
                grades[row[0]] = row[1]
    series = []
    for student_dir in sorted(p for p in corpus_dir.iterdir() if p.is_dir()):
        drafts = sorted(student_dir.glob("draft*.txt"), key=lambda p: p.name)
        if not drafts:
            continue
        series.append(
            EssaySeries(
                student_id=student_dir.name,
                grade=grades.get(student_dir.name),
                drafts=tuple(p.read_text(encoding="utf-8") for p in drafts),
            )
        )
    return series


def cmd_stats(args) -> int:
    report = corpus_stats(_load_corpus(Path(args.corpus_dir)))
    if args.json:
        print(json.dumps({"rows": csv_text(report.to_csv_rows())}, indent=2))
    else:
        print(report.to_text())
    if args.csv:
        write_csv(report.to_csv_rows(), args.csv)
    if args.figures:
        from .figures import save_corpus_stats_chart

        out = Path(args.figures)
        out.mkdir(parents=True, exist_ok=True)
        save_corpus_stats_chart(report, out / "corpus_stats.png")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import create_app
    from .service.config import ServiceConfig

    config = ServiceConfig.load(args.config) if args.config else ServiceConfig()
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    return EXIT_OK


def _add_article_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--lexicon", help="article lexicon JSON (default: bundled sample)")
    parser.add_argument("--embeddings", help="embedding table file (default: bundled sample)")
    parser.add_argument("--config", help="platform config JSON supplying lexicon/embedding paths")
    parser.add_argument("--threshold", type=float, help="override similarity threshold")
    parser.add_argument("--window", type=int, help="override window size")
    parser.add_argument("--stride", type=int, help="override window stride")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="revisecoach", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_score = sub.add_parser("score", help="score essays and select evidence-use feedback")
    p_score.add_argument("files", nargs="+")
    _add_article_flags(p_score)
    p_score.add_argument("--json", action="store_true")
    p_score.add_argument("--csv", help="write per-file results to this CSV")
    p_score.set_defaults(fn=cmd_score)

    p_revise = sub.add_parser("revise", help="extract revisions and select revision feedback")
    p_revise.add_argument("old_file")
    p_revise.add_argument("new_file")
    p_revise.add_argument("--prev-ef", choices=["EF1", "EF2", "EF3"],
                          help="feedback level the old draft received (default: recompute)")
    _add_article_flags(p_revise)
    p_revise.add_argument("--json", action="store_true")
    p_revise.add_argument("--csv", help="write revisions in the annotation interchange format")
    p_revise.set_defaults(fn=cmd_revise)

    p_eval = sub.add_parser("eval", help="compare predictions against gold annotations")
    p_eval.add_argument("pred_file", nargs="?")
    p_eval.add_argument("gold_file", nargs="?")
    p_eval.add_argument("--scores", action="store_true",
                        help="treat inputs as integer score files and report weighted kappa")
    p_eval.add_argument("--column", help="comma-separated score columns (default npe,spc)")
    p_eval.add_argument("--from-matrix", help="compute metrics from a confusion-matrix CSV")
    p_eval.add_argument("--labels", help="comma-separated labels for --from-matrix rows")
    p_eval.add_argument("--positive", help="positive class for headline metrics")
    p_eval.add_argument("--json", action="store_true")
    p_eval.add_argument("--csv", help="write metrics to this CSV")
    p_eval.add_argument("--figures", help="write confusion/grade charts into this directory")
    p_eval.set_defaults(fn=cmd_eval)

    p_stats = sub.add_parser("stats", help="corpus statistics over a drafts directory")
    p_stats.add_argument("corpus_dir")
    p_stats.add_argument("--json", action="store_true")
    p_stats.add_argument("--csv", help="write the stats table to this CSV")
    p_stats.add_argument("--figures", help="write charts into this directory")
    p_stats.set_defaults(fn=cmd_stats)

    p_serve = sub.add_parser("serve", help="run the REST service")
    p_serve.add_argument("--config", help="service config JSON")
    p_serve.set_defaults(fn=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except InputFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename}", file=sys.stderr)
        return EXIT_FORMAT
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
