"""Evaluation machinery: agreement, classifier metrics, corpus reports.

Everything here is batch-oriented and deterministic. Reports carry their
raw numbers plus text-table and CSV renderings so the CLI can emit both
forms byte-stably.
"""

from __future__ import annotations

import csv
import io
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .alignment import ACTION_ADD, ACTION_DELETE, ACTION_MODIFY, align_and_extract
from .classifiers import (
    LABEL_CONTENT,
    LABEL_EVIDENCE,
    LABEL_REASONING,
    LABEL_SUCCESSFUL,
    LABEL_SURFACE,
    LABEL_UNSUCCESSFUL,
    SurfaceContentBaseline,
)
from .errors import DomainError, InputFormatError
from .scoring import EvidenceScore
from .textcore import segment

LABEL_CLAIM = "claim"

_TYPE_VOCAB = {LABEL_SURFACE, LABEL_CONTENT}
_ER_VOCAB = {LABEL_EVIDENCE, LABEL_REASONING, LABEL_CLAIM}
_SUCCESS_VOCAB = {LABEL_SUCCESSFUL, LABEL_UNSUCCESSFUL}


@dataclass(frozen=True)
class AgreementReport:
    qwk: float
    n: int
    label_range: tuple[int, int]


def qwk(a: Sequence[int], b: Sequence[int], label_range: tuple[int, int] | None = None) -> float:
    """Quadratic weighted kappa between two integer ratings.

    1 - (sum w*O) / (sum w*E) with w[i][j] = (i-j)^2 / (R-1)^2, O the
    observed joint counts, and E the outer product of the marginals
    scaled to n. When expected disagreement is zero (both raters constant
    on the same label), returns 1.0 if observed disagreement is zero too,
    else 0.0.
    """
    if len(a) != len(b):
        raise DomainError(f"rating lists differ in length: {len(a)} vs {len(b)}")
    if not a:
        raise DomainError("rating lists are empty")
    xs = [int(v) for v in a]
    ys = [int(v) for v in b]
    if label_range is None:
        lo = min(min(xs), min(ys))
        hi = max(max(xs), max(ys))
    else:
        lo, hi = label_range
        if min(min(xs), min(ys)) < lo or max(max(xs), max(ys)) > hi:
            raise DomainError(f"ratings fall outside declared range [{lo}, {hi}]")
    size = hi - lo + 1
    if size == 1:
        return 1.0
    observed = np.zeros((size, size), dtype=np.float64)
    for x, y in zip(xs, ys):
        observed[x - lo][y - lo] += 1.0
    n = float(len(xs))
    hist_a = observed.sum(axis=1)
    hist_b = observed.sum(axis=0)
    expected = np.outer(hist_a, hist_b) / n
    idx = np.arange(size, dtype=np.float64)
    weights = (idx[:, None] - idx[None, :]) ** 2 / (size - 1) ** 2
    numerator = float((weights * observed).sum())
    denominator = float((weights * expected).sum())
    if denominator == 0.0:
        return 1.0 if numerator == 0.0 else 0.0
    return 1.0 - numerator / denominator


def agreement_report(
    a: Sequence[int], b: Sequence[int], label_range: tuple[int, int] | None = None
) -> AgreementReport:
    value = qwk(a, b, label_range)
    xs = [int(v) for v in a] + [int(v) for v in b]
    actual_range = label_range or (min(xs), max(xs))
    return AgreementReport(qwk=value, n=len(a), label_range=actual_range)


@dataclass(frozen=True)
class ClassSlice:
    label: str
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class ClassifierReport:
    """Precision/recall/F1 bundle with the confusion matrix.

    Matrix rows are gold labels, columns are predictions. ``positive``
    names the class whose precision/recall/f1 are reported as the
    headline numbers; macro averages are emitted alongside to avoid
    convention ambiguity.
    """

    labels: tuple[str, ...]
    confusion: tuple[tuple[int, ...], ...]
    per_class: tuple[ClassSlice, ...]
    n: int
    accuracy: float
    positive: str | None
    precision: float
    recall: float
    f1: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    per_grade: Mapping[str, "ClassifierReport"] = field(default_factory=dict)

    def to_text(self, title: str = "") -> str:
        lines = []
        if title:
            lines.append(title)
        header = f"{'class':<16}{'precision':>10}{'recall':>8}{'f1':>8}{'support':>9}"
        lines.append(header)
        for s in self.per_class:
            lines.append(
                f"{s.label:<16}{s.precision:>10.3f}{s.recall:>8.3f}{s.f1:>8.3f}{s.support:>9d}"
            )
        lines.append(
            f"{'macro':<16}{self.macro_precision:>10.3f}{self.macro_recall:>8.3f}"
            f"{self.macro_f1:>8.3f}{self.n:>9d}"
        )
        if self.positive is not None:
            lines.append(
                f"{'overall(' + self.positive + ')':<16}{self.precision:>10.3f}"
                f"{self.recall:>8.3f}{self.f1:>8.3f}{self.n:>9d}"
            )
        lines.append(f"accuracy: {self.accuracy:.3f}  n: {self.n}")
        lines.append("confusion (rows=gold, cols=predicted):")
        width = max(len(l) for l in self.labels) + 2
        lines.append(" " * width + "".join(f"{l:>{width}}" for l in self.labels))
        for label, row in zip(self.labels, self.confusion):
            lines.append(f"{label:>{width}}" + "".join(f"{v:>{width}d}" for v in row))
        for grade in sorted(self.per_grade):
            lines.append("")
            lines.append(self.per_grade[grade].to_text(title=f"grade {grade}"))
        return "\n".join(lines)

    def to_csv_rows(self) -> list[list[str]]:
        rows = [["slice", "class", "precision", "recall", "f1", "support"]]
        for s in self.per_class:
            rows.append(
                ["overall", s.label, f"{s.precision:.6f}", f"{s.recall:.6f}", f"{s.f1:.6f}", str(s.support)]
            )
        rows.append(
            [
                "overall",
                "macro",
                f"{self.macro_precision:.6f}",
                f"{self.macro_recall:.6f}",
                f"{self.macro_f1:.6f}",
                str(self.n),
            ]
        )
        for grade in sorted(self.per_grade):
            sub = self.per_grade[grade]
            for s in sub.per_class:
                rows.append(
                    [
                        f"grade:{grade}",
                        s.label,
                        f"{s.precision:.6f}",
                        f"{s.recall:.6f}",
                        f"{s.f1:.6f}",
                        str(s.support),
                    ]
                )
        return rows


def _safe_div(num: float, den: float) -> float:
    return num / den if den else 0.0


def metrics_from_confusion(
    matrix: Sequence[Sequence[int]],
    labels: Sequence[str],
    positive: str | None = None,
) -> ClassifierReport:
    """Build a report straight from a confusion matrix (rows=gold)."""
    k = len(labels)
    if len(matrix) != k or any(len(row) != k for row in matrix):
        raise DomainError(f"confusion matrix must be {k}x{k} to match {k} labels")
    if positive is not None and positive not in labels:
        raise DomainError(f"positive class {positive!r} not among labels {list(labels)}")
    grid = [[int(v) for v in row] for row in matrix]
    n = sum(sum(row) for row in grid)
    slices: list[ClassSlice] = []
    for idx, label in enumerate(labels):
        tp = grid[idx][idx]
        fp = sum(grid[g][idx] for g in range(k)) - tp
        fn = sum(grid[idx][p] for p in range(k)) - tp
        precision = _safe_div(tp, tp + fp)
        recall = _safe_div(tp, tp + fn)
        f1 = _safe_div(2 * precision * recall, precision + recall)
        slices.append(ClassSlice(label, precision, recall, f1, tp + fn))
    macro_p = sum(s.precision for s in slices) / k
    macro_r = sum(s.recall for s in slices) / k
    macro_f = sum(s.f1 for s in slices) / k
    accuracy = _safe_div(sum(grid[i][i] for i in range(k)), n)
    if positive is not None:
        head = next(s for s in slices if s.label == positive)
        precision, recall, f1 = head.precision, head.recall, head.f1
    else:
        precision, recall, f1 = macro_p, macro_r, macro_f
    return ClassifierReport(
        labels=tuple(labels),
        confusion=tuple(tuple(row) for row in grid),
        per_class=tuple(slices),
        n=n,
        accuracy=accuracy,
        positive=positive,
        precision=precision,
        recall=recall,
        f1=f1,
        macro_precision=macro_p,
        macro_recall=macro_r,
        macro_f1=macro_f,
    )


def classifier_metrics(
    pred: Sequence[str],
    gold: Sequence[str],
    positive: str | None = None,
    grade_of: Sequence[object] | None = None,
    labels: Sequence[str] | None = None,
) -> ClassifierReport:
    """Per-class precision/recall/F1 with confusion matrix, optionally
    sliced by grade metadata aligned with the label sequences."""
    if len(pred) != len(gold):
        raise DomainError(f"prediction/gold lengths differ: {len(pred)} vs {len(gold)}")
    if not pred:
        raise DomainError("no labels to score")
    if labels is None:
        labels = sorted(set(gold) | set(pred))
    index = {label: i for i, label in enumerate(labels)}
    unknown = (set(gold) | set(pred)) - set(labels)
    if unknown:
        raise DomainError(f"labels outside declared space: {sorted(unknown)}")
    k = len(labels)
    grid = [[0] * k for _ in range(k)]
    for p, g in zip(pred, gold):
        grid[index[g]][index[p]] += 1
    report = metrics_from_confusion(grid, labels, positive)
    if grade_of is not None:
        if len(grade_of) != len(pred):
            raise DomainError("grade metadata length does not match labels")
        buckets: dict[str, tuple[list[str], list[str]]] = defaultdict(lambda: ([], []))
        for p, g, grade in zip(pred, gold, grade_of):
            bucket = buckets[str(grade)]
            bucket[0].append(p)
            bucket[1].append(g)
        per_grade = {
            grade: classifier_metrics(ps, gs, positive, labels=labels)
            for grade, (ps, gs) in buckets.items()
        }
        report = ClassifierReport(
            labels=report.labels,
            confusion=report.confusion,
            per_class=report.per_class,
            n=report.n,
            accuracy=report.accuracy,
            positive=report.positive,
            precision=report.precision,
            recall=report.recall,
            f1=report.f1,
            macro_precision=report.macro_precision,
            macro_recall=report.macro_recall,
            macro_f1=report.macro_f1,
            per_grade=per_grade,
        )
    return report


def format_delta_pct(pct: float | None) -> str:
    """Signed percent change at three significant figures; '' when undefined."""
    if pct is None:
        return ""
    if pct == 0:
        return "0%"
    sign = "+" if pct > 0 else "-"
    return f"{sign}{abs(pct):.3g}%"


@dataclass(frozen=True)
class DeltaRow:
    level: str
    n: int
    npe_old: float
    npe_new: float
    npe_delta_pct: float | None
    spc_old: float
    spc_new: float
    spc_delta_pct: float | None


@dataclass(frozen=True)
class DeltaReport:
    rows: tuple[DeltaRow, ...]

    def to_text(self) -> str:
        lines = [
            f"{'feedback':<10}{'n':>5}{'NPE old/new':>16}{'dNPE':>9}{'SPC old/new':>16}{'dSPC':>9}"
        ]
        for r in self.rows:
            lines.append(
                f"{r.level:<10}{r.n:>5}"
                f"{f'{r.npe_old:.2f} / {r.npe_new:.2f}':>16}{format_delta_pct(r.npe_delta_pct):>9}"
                f"{f'{r.spc_old:.2f} / {r.spc_new:.2f}':>16}{format_delta_pct(r.spc_delta_pct):>9}"
            )
        return "\n".join(lines)

    def to_csv_rows(self) -> list[list[str]]:
        rows = [["level", "n", "npe_old", "npe_new", "npe_delta", "spc_old", "spc_new", "spc_delta"]]
        for r in self.rows:
            rows.append(
                [
                    r.level,
                    str(r.n),
                    f"{r.npe_old:.6f}",
                    f"{r.npe_new:.6f}",
                    format_delta_pct(r.npe_delta_pct),
                    f"{r.spc_old:.6f}",
                    f"{r.spc_new:.6f}",
                    format_delta_pct(r.spc_delta_pct),
                ]
            )
        return rows


def delta_analysis(
    pairs: Iterable[tuple[EvidenceScore, EvidenceScore, str]],
) -> DeltaReport:
    """Indicator changes between draft pairs, grouped by the EF level the
    old draft received. Delta is (mean_new - mean_old) / mean_old * 100;
    groups with no pairs are omitted, and a delta over a zero mean is
    left undefined."""
    groups: dict[str, list[tuple[EvidenceScore, EvidenceScore]]] = defaultdict(list)
    for old, new, level in pairs:
        groups[level].append((old, new))
    rows: list[DeltaRow] = []
    for level in ("EF1", "EF2", "EF3"):
        members = groups.get(level)
        if not members:
            continue
        npe_old = sum(o.npe for o, _ in members) / len(members)
        npe_new = sum(n.npe for _, n in members) / len(members)
        spc_old = sum(o.spc for o, _ in members) / len(members)
        spc_new = sum(n.spc for _, n in members) / len(members)
        rows.append(
            DeltaRow(
                level=level,
                n=len(members),
                npe_old=npe_old,
                npe_new=npe_new,
                npe_delta_pct=None if npe_old == 0 else (npe_new - npe_old) / npe_old * 100.0,
                spc_old=spc_old,
                spc_new=spc_new,
                spc_delta_pct=None if spc_old == 0 else (spc_new - spc_old) / spc_old * 100.0,
            )
        )
    return DeltaReport(rows=tuple(rows))


@dataclass(frozen=True)
class EssaySeries:
    """One student's drafts, in submission order."""

    student_id: str
    grade: object | None
    drafts: tuple[str, ...]


@dataclass(frozen=True)
class PairStats:
    pairs: int
    adds: float
    deletes: float
    modifies: float
    surface: float
    content: float


@dataclass(frozen=True)
class StatsRow:
    grade: str
    essays: int
    mean_wc: float
    pair_stats: tuple[PairStats | None, ...]


@dataclass(frozen=True)
class CorpusStatsReport:
    rows: tuple[StatsRow, ...]
    max_pairs: int

    def to_text(self) -> str:
        headers = [f"{'grade':<10}{'essays':>7}{'WC':>8}"]
        for i in range(self.max_pairs):
            headers.append(f"{'add':>7}{'del':>7}{'mod':>7}{'surf':>7}{'cont':>7} (d{i + 1}-d{i + 2})")
        lines = ["".join(headers)]
        for row in self.rows:
            cells = [f"{row.grade:<10}{row.essays:>7}{row.mean_wc:>8.1f}"]
            for stats in row.pair_stats:
                if stats is None:
                    cells.append(f"{'-':>7}{'-':>7}{'-':>7}{'-':>7}{'-':>7}" + " " * 10)
                else:
                    cells.append(
                        f"{stats.adds:>7.1f}{stats.deletes:>7.1f}{stats.modifies:>7.1f}"
                        f"{stats.surface:>7.1f}{stats.content:>7.1f}" + " " * 10
                    )
            lines.append("".join(cells))
        return "\n".join(lines)

    def to_csv_rows(self) -> list[list[str]]:
        header = ["grade", "essays", "mean_wc"]
        for i in range(self.max_pairs):
            tag = f"d{i + 1}d{i + 2}"
            header.extend(
                [f"add_{tag}", f"delete_{tag}", f"modify_{tag}", f"surface_{tag}", f"content_{tag}"]
            )
        rows = [header]
        for row in self.rows:
            cells = [row.grade, str(row.essays), f"{row.mean_wc:.2f}"]
            for stats in row.pair_stats:
                if stats is None:
                    cells.extend([""] * 5)
                else:
                    cells.extend(
                        [
                            f"{stats.adds:.2f}",
                            f"{stats.deletes:.2f}",
                            f"{stats.modifies:.2f}",
                            f"{stats.surface:.2f}",
                            f"{stats.content:.2f}",
                        ]
                    )
            rows.append(cells)
        return rows


def corpus_stats(series: Iterable[EssaySeries]) -> CorpusStatsReport:
    """Essay counts, mean word counts, and mean revision action/type
    counts per consecutive draft pair, per grade and overall."""
    classifier = SurfaceContentBaseline()
    per_grade: dict[str, list[dict]] = defaultdict(list)
    all_entries: list[dict] = []
    max_pairs = 0
    for item in series:
        docs = [segment(text) for text in item.drafts]
        entry = {
            "essays": len(docs),
            "wc": [d.word_count() for d in docs],
            "pairs": [],
        }
        for old_doc, new_doc in zip(docs, docs[1:]):
            revisions = align_and_extract(old_doc, new_doc)
            counts = {
                ACTION_ADD: 0,
                ACTION_DELETE: 0,
                ACTION_MODIFY: 0,
                LABEL_SURFACE: 0,
                LABEL_CONTENT: 0,
            }
            for rev in revisions:
                counts[rev.action] += 1
                counts[classifier.classify(rev).label] += 1
            entry["pairs"].append(counts)
        max_pairs = max(max_pairs, len(entry["pairs"]))
        grade = "?" if item.grade is None else str(item.grade)
        per_grade[grade].append(entry)
        all_entries.append(entry)

    def summarize(entries: list[dict], grade: str) -> StatsRow:
        essays = sum(e["essays"] for e in entries)
        words = [w for e in entries for w in e["wc"]]
        mean_wc = sum(words) / len(words) if words else 0.0
        pair_stats: list[PairStats | None] = []
        for i in range(max_pairs):
            rows = [e["pairs"][i] for e in entries if len(e["pairs"]) > i]
            if not rows:
                pair_stats.append(None)
                continue
            pair_stats.append(
                PairStats(
                    pairs=len(rows),
                    adds=sum(r[ACTION_ADD] for r in rows) / len(rows),
                    deletes=sum(r[ACTION_DELETE] for r in rows) / len(rows),
                    modifies=sum(r[ACTION_MODIFY] for r in rows) / len(rows),
                    surface=sum(r[LABEL_SURFACE] for r in rows) / len(rows),
                    content=sum(r[LABEL_CONTENT] for r in rows) / len(rows),
                )
            )
        return StatsRow(grade=grade, essays=essays, mean_wc=mean_wc, pair_stats=tuple(pair_stats))

    rows = [summarize(per_grade[g], g) for g in sorted(per_grade)]
    if all_entries:
        rows.append(summarize(all_entries, "overall"))
    return CorpusStatsReport(rows=tuple(rows), max_pairs=max_pairs)


ANNOTATION_COLUMNS = (
    "essay_id",
    "grade",
    "draft_from",
    "draft_to",
    "old_index",
    "new_index",
    "action",
    "type_label",
    "er_label",
    "success_label",
)


@dataclass(frozen=True)
class AnnotationRow:
    essay_id: str
    grade: str
    draft_from: int
    draft_to: int
    old_index: int | None
    new_index: int | None
    action: str
    type_label: str | None
    er_label: str | None
    success_label: str | None

    def key(self) -> tuple:
        return (self.essay_id, self.draft_from, self.draft_to, self.old_index, self.new_index)


@dataclass(frozen=True)
class AnnotationSet:
    rows: tuple[AnnotationRow, ...]

    def type_labels(self) -> list[str]:
        return [r.type_label for r in self.rows if r.type_label]

    def er_rows(self) -> list[AnnotationRow]:
        """Content rows with a binary evidence/reasoning label; claim rows
        cannot be scored against a binary classifier and are dropped."""
        return [
            r
            for r in self.rows
            if r.type_label == LABEL_CONTENT
            and r.er_label in (LABEL_EVIDENCE, LABEL_REASONING)
        ]

    def success_rows(self) -> list[AnnotationRow]:
        """Rows eligible for success evaluation; claim rows are removed."""
        return [r for r in self.er_rows() if r.success_label in _SUCCESS_VOCAB]


def _opt_int(value: str) -> int | None:
    value = value.strip()
    return int(value) if value else None


def _opt_label(value: str, vocab: set[str], *, path: str, line: int, column: str) -> str | None:
    value = value.strip()
    if not value:
        return None
    if value not in vocab:
        raise InputFormatError(
            f"bad {column} value {value!r} (expected one of {sorted(vocab)})",
            path=path,
            line=line,
        )
    return value


def load_annotations(path: str | Path) -> AnnotationSet:
    """Read the annotation interchange CSV, validating label vocabularies.

    Extra columns are ignored; missing required columns or out-of-
    vocabulary labels raise with the offending line number.
    """
    path = Path(path)
    rows: list[AnnotationRow] = []
    with path.open("r", encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None:
            raise InputFormatError("file is empty", path=str(path), line=1)
        missing = [c for c in ANNOTATION_COLUMNS if c not in reader.fieldnames]
        if missing:
            raise InputFormatError(f"missing columns: {missing}", path=str(path), line=1)
        for lineno, record in enumerate(reader, start=2):
            try:
                action = record["action"].strip()
                if action not in (ACTION_ADD, ACTION_DELETE, ACTION_MODIFY):
                    raise InputFormatError(
                        f"bad action {action!r}", path=str(path), line=lineno
                    )
                rows.append(
                    AnnotationRow(
                        essay_id=record["essay_id"].strip(),
                        grade=record["grade"].strip(),
                        draft_from=int(record["draft_from"]),
                        draft_to=int(record["draft_to"]),
                        old_index=_opt_int(record["old_index"]),
                        new_index=_opt_int(record["new_index"]),
                        action=action,
                        type_label=_opt_label(
                            record["type_label"], _TYPE_VOCAB,
                            path=str(path), line=lineno, column="type_label",
                        ),
                        er_label=_opt_label(
                            record["er_label"], _ER_VOCAB,
                            path=str(path), line=lineno, column="er_label",
                        ),
                        success_label=_opt_label(
                            record["success_label"], _SUCCESS_VOCAB,
                            path=str(path), line=lineno, column="success_label",
                        ),
                    )
                )
            except (ValueError, KeyError) as exc:
                raise InputFormatError(str(exc), path=str(path), line=lineno) from exc
    return AnnotationSet(rows=tuple(rows))


def write_csv(rows: list[list[str]], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        csv.writer(handle).writerows(rows)


def csv_text(rows: list[list[str]]) -> str:
    buffer = io.StringIO()
    csv.writer(buffer).writerows(rows)
    return buffer.getvalue()
