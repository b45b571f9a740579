from __future__ import annotations

import random

import pytest

from oracles import prf_reference, qwk_reference
from revisecoach.errors import DomainError, InputFormatError
from revisecoach.metrics import (
    EssaySeries,
    agreement_report,
    classifier_metrics,
    corpus_stats,
    delta_analysis,
    format_delta_pct,
    load_annotations,
    metrics_from_confusion,
    qwk,
)
from revisecoach.scoring import EvidenceScore


def score_of(npe: int, spc: int = 0) -> EvidenceScore:
    return EvidenceScore(
        article_id="x", npe=npe, topic_hits={}, spc_vector=(spc,), spc=spc, word_count=0
    )


class TestQwk:
    def test_perfect_agreement(self):
        assert qwk([1, 2, 3, 4], [1, 2, 3, 4]) == 1.0

    def test_reversed_ratings_golden(self):
        # Hand evaluation: observed disagreement 20/9, expected 10/9.
        assert qwk([1, 2, 3, 4], [4, 3, 2, 1]) == pytest.approx(-1.0)

    def test_single_off_by_one_among_hundred(self):
        a = [1, 2, 3, 4] * 25
        b = list(a)
        b[0] = 2
        assert qwk(a, b) > 0.9

    def test_degenerate_constant_identical(self):
        assert qwk([2, 2, 2], [2, 2, 2]) == 1.0
        assert qwk([2, 2, 2], [2, 2, 2], label_range=(0, 4)) == 1.0

    def test_errors(self):
        with pytest.raises(DomainError):
            qwk([1, 2], [1])
        with pytest.raises(DomainError):
            qwk([], [])
        with pytest.raises(DomainError):
            qwk([5], [1], label_range=(1, 4))

    def test_symmetry_and_range(self):
        rng = random.Random(21)
        for _ in range(100):
            n = rng.randint(2, 40)
            a = [rng.randint(0, 4) for _ in range(n)]
            b = [rng.randint(0, 4) for _ in range(n)]
            value = qwk(a, b)
            assert qwk(b, a) == pytest.approx(value)
            assert -1.0 - 1e-9 <= value <= 1.0 + 1e-9

    def test_matches_reference_implementation(self):
        rng = random.Random(22)
        for _ in range(300):
            n = rng.randint(1, 50)
            a = [rng.randint(0, 4) for _ in range(n)]
            b = [rng.randint(0, 4) for _ in range(n)]
            assert abs(qwk(a, b) - qwk_reference(a, b)) < 1e-12

    def test_matches_sklearn(self):
        sklearn_metrics = pytest.importorskip("sklearn.metrics")
        rng = random.Random(23)
        for _ in range(30):
            n = rng.randint(5, 60)
            a = [rng.randint(0, 4) for _ in range(n)]
            b = [rng.randint(0, 4) for _ in range(n)]
            if len(set(a) | set(b)) < 2:
                continue
            expected = sklearn_metrics.cohen_kappa_score(
                a, b, labels=list(range(0, 5)), weights="quadratic"
            )
            assert qwk(a, b, label_range=(0, 4)) == pytest.approx(expected, abs=1e-10)

    def test_agreement_report(self):
        report = agreement_report([1, 2, 3], [1, 2, 3])
        assert report.qwk == 1.0
        assert report.n == 3
        assert report.label_range == (1, 3)


class TestClassifierMetrics:
    def test_perfect_predictions(self):
        report = classifier_metrics(["a", "b", "a"], ["a", "b", "a"], positive="a")
        assert report.precision == report.recall == report.f1 == 1.0
        assert report.confusion == ((2, 0), (0, 1))
        assert report.accuracy == 1.0

    def test_all_wrong(self):
        report = classifier_metrics(["b", "b"], ["a", "a"], positive="a", labels=["a", "b"])
        assert report.f1 == 0.0
        assert report.accuracy == 0.0

    def test_published_confusion_matrix_reproduces_reported_metrics(self):
        report = metrics_from_confusion(
            [[268, 50], [37, 1170]], ["surface", "content"], positive="content"
        )
        assert report.precision == pytest.approx(0.96, abs=0.005)
        assert report.recall == pytest.approx(0.97, abs=0.005)
        assert report.f1 == pytest.approx(0.96, abs=0.005)
        assert report.n == 268 + 50 + 37 + 1170

    def test_confusion_rows_are_gold(self):
        report = classifier_metrics(["a"], ["b"], labels=["a", "b"])
        # gold b predicted a -> row of b, column of a
        assert report.confusion == ((0, 0), (1, 0))

    def test_micro_counts_sum_to_n(self):
        rng = random.Random(31)
        labels = ["x", "y", "z"]
        pred = [rng.choice(labels) for _ in range(200)]
        gold = [rng.choice(labels) for _ in range(200)]
        report = classifier_metrics(pred, gold, labels=labels)
        assert sum(sum(row) for row in report.confusion) == 200
        assert sum(s.support for s in report.per_class) == 200

    def test_matches_reference_positive_class(self):
        rng = random.Random(32)
        for _ in range(100):
            n = rng.randint(1, 60)
            pred = [rng.choice(["p", "n"]) for _ in range(n)]
            gold = [rng.choice(["p", "n"]) for _ in range(n)]
            report = classifier_metrics(pred, gold, positive="p", labels=["p", "n"])
            precision, recall, f1 = prf_reference(pred, gold, "p")
            assert abs(report.precision - precision) < 1e-12
            assert abs(report.recall - recall) < 1e-12
            assert abs(report.f1 - f1) < 1e-12

    def test_matches_sklearn(self):
        sklearn_metrics = pytest.importorskip("sklearn.metrics")
        rng = random.Random(33)
        for _ in range(30):
            n = rng.randint(2, 60)
            pred = [rng.choice(["p", "n"]) for _ in range(n)]
            gold = [rng.choice(["p", "n"]) for _ in range(n)]
            report = classifier_metrics(pred, gold, positive="p", labels=["p", "n"])
            precision, recall, f1, _ = sklearn_metrics.precision_recall_fscore_support(
                gold, pred, labels=["p"], average=None, zero_division=0
            )
            assert report.precision == pytest.approx(precision[0], abs=1e-12)
            assert report.recall == pytest.approx(recall[0], abs=1e-12)
            assert report.f1 == pytest.approx(f1[0], abs=1e-12)

    def test_per_grade_slices(self):
        pred = ["p", "n", "p", "p"]
        gold = ["p", "p", "p", "n"]
        grades = [4, 4, 5, 5]
        report = classifier_metrics(pred, gold, positive="p", grade_of=grades, labels=["p", "n"])
        assert set(report.per_grade) == {"4", "5"}
        assert report.per_grade["4"].n == 2
        assert report.per_grade["4"].recall == pytest.approx(0.5)

    def test_shape_validation(self):
        with pytest.raises(DomainError):
            metrics_from_confusion([[1, 2]], ["a", "b"])
        with pytest.raises(DomainError):
            metrics_from_confusion([[1, 0], [0, 1]], ["a", "b"], positive="c")
        with pytest.raises(DomainError):
            classifier_metrics(["a"], ["a", "b"])
        with pytest.raises(DomainError):
            classifier_metrics(["q"], ["a"], labels=["a", "b"])

    def test_text_rendering_runs(self):
        report = classifier_metrics(["a", "b"], ["a", "b"], positive="b", grade_of=[4, 4])
        text = report.to_text()
        assert "confusion" in text
        assert "grade 4" in text


class TestDeltaAnalysis:
    def test_identical_drafts_zero_delta(self):
        pairs = [(score_of(2, 3), score_of(2, 3), "EF1")] * 4
        report = delta_analysis(pairs)
        assert len(report.rows) == 1
        assert report.rows[0].npe_delta_pct == 0.0
        assert format_delta_pct(report.rows[0].npe_delta_pct) == "0%"

    def test_published_ef1_row_formats_to_plus_128_percent(self):
        old_values = [1] * 91 + [2] * 9          # mean 1.09
        new_values = [2] * 51 + [3] * 49         # mean 2.49
        pairs = [
            (score_of(o), score_of(n), "EF1") for o, n in zip(old_values, new_values)
        ]
        report = delta_analysis(pairs)
        row = report.rows[0]
        assert row.npe_old == pytest.approx(1.09)
        assert row.npe_new == pytest.approx(2.49)
        assert format_delta_pct(row.npe_delta_pct) == "+128%"

    def test_empty_group_omitted(self):
        pairs = [(score_of(1), score_of(2), "EF1")]
        report = delta_analysis(pairs)
        assert [r.level for r in report.rows] == ["EF1"]

    def test_scale_consistency(self):
        rng = random.Random(41)
        pairs = [
            (score_of(rng.randint(1, 4), rng.randint(1, 9)),
             score_of(rng.randint(1, 4), rng.randint(1, 9)), "EF2")
            for _ in range(20)
        ]
        scaled = [
            (score_of(o.npe * 3, o.spc * 3), score_of(n.npe * 3, n.spc * 3), "EF2")
            for o, n, _ in pairs
        ]
        base = delta_analysis(pairs).rows[0]
        tripled = delta_analysis(scaled).rows[0]
        assert base.npe_delta_pct == pytest.approx(tripled.npe_delta_pct)
        assert base.spc_delta_pct == pytest.approx(tripled.spc_delta_pct)

    def test_zero_mean_delta_undefined(self):
        pairs = [(score_of(0, 0), score_of(2, 2), "EF1")]
        row = delta_analysis(pairs).rows[0]
        assert row.npe_delta_pct is None
        assert format_delta_pct(row.npe_delta_pct) == ""

    @pytest.mark.parametrize(
        "old,new,expected",
        [
            (2.64, 3.18, "+20.5%"),
            (3.03, 3.09, "+1.98%"),
            (3.18, 2.82, "-11.3%"),
            (4.41, 9.18, "+108%"),
        ],
    )
    def test_three_significant_figure_formatting(self, old, new, expected):
        pct = (new - old) / old * 100.0
        assert format_delta_pct(pct) == expected

    def test_report_renderings(self):
        pairs = [(score_of(1, 2), score_of(2, 4), "EF1")]
        report = delta_analysis(pairs)
        assert "EF1" in report.to_text()
        rows = report.to_csv_rows()
        assert rows[0][0] == "level"
        assert rows[1][0] == "EF1"


class TestCorpusStats:
    def test_empty_corpus(self):
        report = corpus_stats([])
        assert report.rows == ()

    def test_demo_fixture_hand_tally(self, demo_texts):
        series = [
            EssaySeries("alice", 5, tuple(demo_texts[("alice", k)] for k in (1, 2, 3))),
            EssaySeries("bob", 7, tuple(demo_texts[("bob", k)] for k in (1, 2, 3))),
        ]
        report = corpus_stats(series)
        by_grade = {r.grade: r for r in report.rows}
        assert set(by_grade) == {"5", "7", "overall"}
        overall = by_grade["overall"]
        assert overall.essays == 6
        assert overall.mean_wc == pytest.approx(54.5)
        first, second = overall.pair_stats
        # d1-d2: one addition each, nothing else.
        assert (first.adds, first.deletes, first.modifies) == (1.0, 0.0, 0.0)
        assert (first.surface, first.content) == (0.0, 1.0)
        # d2-d3: alice makes 2 adds + 1 surface modify, bob 2 adds + 1 delete.
        assert (second.adds, second.deletes, second.modifies) == (2.0, 0.5, 0.5)
        assert (second.surface, second.content) == (0.5, 2.5)

    def test_single_draft_has_blank_revision_columns(self):
        report = corpus_stats([EssaySeries("solo", 4, ("One single draft here.",))])
        row = report.rows[0]
        assert row.essays == 1
        assert row.pair_stats == ()
        assert report.max_pairs == 0
        assert "solo" not in report.to_text()  # rows keyed by grade, not id

    def test_unknown_grade_bucket(self):
        report = corpus_stats([EssaySeries("x", None, ("Words here.", "Words here too."))])
        assert report.rows[0].grade == "?"

    def test_csv_rendering(self, demo_texts):
        series = [EssaySeries("alice", 5, tuple(demo_texts[("alice", k)] for k in (1, 2, 3)))]
        rows = corpus_stats(series).to_csv_rows()
        assert rows[0][:3] == ["grade", "essays", "mean_wc"]
        assert any(r[0] == "overall" for r in rows[1:])


ANNOTATION_CSV = """essay_id,grade,draft_from,draft_to,old_index,new_index,action,type_label,er_label,success_label,note
e1,4,1,2,0,0,modify,surface,,,quote fix
e1,4,1,2,1,1,modify,content,evidence,successful,
e1,4,1,2,2,,delete,content,reasoning,successful,
e1,4,1,2,,2,add,content,claim,,excluded from success eval
e2,5,1,2,,0,add,content,evidence,unsuccessful,
"""


class TestLoadAnnotations:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "gold.csv"
        path.write_text(ANNOTATION_CSV, encoding="utf-8")
        annotations = load_annotations(path)
        assert len(annotations.rows) == 5
        assert annotations.type_labels().count("content") == 4
        er_rows = annotations.er_rows()
        assert len(er_rows) == 3  # claim row excluded from the binary task
        success_rows = annotations.success_rows()
        assert len(success_rows) == 3
        assert all(r.er_label != "claim" for r in success_rows)

    def test_bad_label_reports_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text(
            ANNOTATION_CSV.replace("modify,surface", "modify,sparkle", 1), encoding="utf-8"
        )
        with pytest.raises(InputFormatError) as info:
            load_annotations(path)
        assert info.value.line == 2

    def test_bad_action_reports_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text(ANNOTATION_CSV.replace("e2,5,1,2,,0,add", "e2,5,1,2,,0,insert"), encoding="utf-8")
        with pytest.raises(InputFormatError) as info:
            load_annotations(path)
        assert info.value.line == 6

    def test_missing_columns_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("essay_id,grade\ne1,4\n", encoding="utf-8")
        with pytest.raises(InputFormatError) as info:
            load_annotations(path)
        assert "missing columns" in str(info.value)
