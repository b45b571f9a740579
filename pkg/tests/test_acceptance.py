"""Acceptance suite: one test per criterion, each printing a PASS/FAIL
line (run with -s to see them inline). Tolerances and runtime budgets are
pinned in the assertions."""

from __future__ import annotations

import itertools
import random
import time
from contextlib import contextmanager
from pathlib import Path

import pytest

from oracles import (
    brute_force_npe,
    brute_force_spc,
    keyword_search_npe,
    keyword_search_spc,
    prf_reference,
    qwk_reference,
)
from test_feedback import EXPECTED as EXPECTED_MESSAGES
from revisecoach.alignment import AlignedPair, RevisionPair, align, extract_revisions
from revisecoach.embeddings import EmbeddingTable
from revisecoach.feedback import (
    RF_LEVELS,
    Thresholds,
    render,
    replay_trace,
    select_ef,
    select_rf,
)
from revisecoach.lexicon import ArticleConfig, SpecificityLexicon, TopicLexicon
from revisecoach.metrics import (
    classifier_metrics,
    delta_analysis,
    format_delta_pct,
    metrics_from_confusion,
    qwk,
)
from revisecoach.scoring import ArticleMatcher, EvidenceScore, compute_npe, compute_spc
from revisecoach.textcore import segment

GOLDEN = Path(__file__).parent / "golden"


@contextmanager
def criterion(name: str, budget_seconds: float | None = None):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"\nACCEPTANCE FAIL: {name}")
        raise
    elapsed = time.perf_counter() - start
    if budget_seconds is not None:
        assert elapsed < budget_seconds, f"{name}: took {elapsed:.2f}s, budget {budget_seconds}s"
    print(f"\nACCEPTANCE PASS: {name} ({elapsed:.2f}s)")


TH = Thresholds(alpha=2, beta=4, gamma=2)

TOY_CONFIG = ArticleConfig(
    article_id="toy",
    topic_lexicon=TopicLexicon(
        article_id="toy", topics=(("T0", ("hospital",)), ("T1", ("school",)))
    ),
    spec_lexicon=SpecificityLexicon(
        article_id="toy", categories=(("C1", ("nets",)), ("C2", ("fertilizer",)))
    ),
)
TOY_MATCHER = ArticleMatcher(TOY_CONFIG, EmbeddingTable(2, {}))


def make_score(npe: int, spc: int, topics: int = 4) -> EvidenceScore:
    hits = {f"T{i}": (frozenset({(0, 5)}) if i < npe else frozenset()) for i in range(topics)}
    return EvidenceScore(
        article_id="toy", npe=npe, topic_hits=hits, spc_vector=(spc,), spc=spc, word_count=100
    )


def content_add(text, er="evidence", success="unsuccessful"):
    return RevisionPair(
        AlignedPair(None, 0, None, text, 0.0), "add",
        type_label="content", er_label=er, success_label=success,
    )


def content_delete(text, er="reasoning", success="successful"):
    return RevisionPair(
        AlignedPair(0, None, text, None, 0.0), "delete",
        type_label="content", er_label=er, success_label=success,
    )


def surface_modify():
    return RevisionPair(AlignedPair(0, 0, "a word.", "a word!", 0.9), "modify",
                        type_label="surface")


class TestEvidenceFeedbackTree:
    def test_exhaustive_grid_matches_guard_rows(self):
        with criterion("EF tree conformance (npe 0..6 x spc 0..20, alpha=2, beta=4)", 1.0):
            for npe, spc in itertools.product(range(0, 7), range(0, 21)):
                decision = select_ef(make_score(npe, spc), TH)
                matching = []
                if npe <= TH.alpha:
                    matching.append("EF1")
                if npe > TH.alpha and spc <= TH.beta:
                    matching.append("EF2")
                if npe > TH.alpha and spc > TH.beta:
                    matching.append("EF3")
                assert len(matching) == 1, (npe, spc)
                assert decision.level == matching[0], (npe, spc)
                assert replay_trace(decision.trace) == decision.level


REASONING_MULTISETS = [
    (),
    ("unsuccessful",),
    ("successful",),
    ("unsuccessful", "successful"),
]

APPENDIX_PATHS = [
    # (path name, prev_ef, old, new, revisions, expected level)
    ("no revisions at all", "EF1", make_score(1, 1), make_score(1, 1), [], "RF1"),
    ("all deletions", "EF2", make_score(3, 3), make_score(2, 2),
     [content_delete("one gone."), content_delete("two gone.")], "RF1"),
    ("surface revisions only", "EF1", make_score(1, 1), make_score(1, 1),
     [surface_modify()], "RF2"),
    ("EF1: same topic count, repeated topic word", "EF1", make_score(1, 1), make_score(1, 1),
     [content_add("the hospital again.")], "RF3"),
    ("EF1: no gain, no topic words", "EF1", make_score(1, 1), make_score(1, 1),
     [content_add("just my own thinking.")], "RF4"),
    ("EF1: topic gain, small specificity gain", "EF1", make_score(1, 1), make_score(2, 2),
     [content_add("now the school too.")], "RF5"),
    ("EF1: successful response", "EF1", make_score(1, 1), make_score(2, 4),
     [content_add("the school with nets and fertilizer.")], "RF6"),
    ("EF2: small gain, no specificity words", "EF2", make_score(3, 3), make_score(3, 3),
     [content_add("only my own thoughts.")], "RF4"),
    ("EF2: small gain with specificity words", "EF2", make_score(3, 3), make_score(3, 4),
     [content_add("the nets helped.")], "RF5"),
    ("EF2: successful response", "EF2", make_score(3, 3), make_score(3, 6),
     [content_add("nets and fertilizer details.")], "RF7"),
    ("EF3: no reasoning revision", "EF3", make_score(3, 9), make_score(3, 10),
     [content_add("the hospital detail.", er="evidence")], "RF8"),
    ("EF3: unsuccessful reasoning only", "EF3", make_score(3, 9), make_score(3, 9),
     [content_add("weak reasoning.", er="reasoning", success="unsuccessful")], "RF9"),
    ("EF3: successful reasoning present", "EF3", make_score(3, 9), make_score(3, 9),
     [content_add("weak.", er="reasoning", success="unsuccessful"),
      content_add("strong.", er="reasoning", success="successful")], "RF10"),
]


class TestRevisionFeedbackTree:
    def test_totality_determinism_and_documented_paths(self):
        with criterion("RF tree totality/determinism + documented path examples", 1.0):
            points = 0
            for prev_ef, dnpe, dspc, topic_word, spc_word, multiset in itertools.product(
                ("EF1", "EF2", "EF3"),
                (-1, 0, 1),
                range(0, 5),
                (False, True),
                (False, True),
                REASONING_MULTISETS,
            ):
                old = make_score(2, 5)
                new = make_score(2 + dnpe, 5 + dspc)
                revisions = []
                if topic_word:
                    revisions.append(content_add("the hospital mention."))
                if spc_word:
                    revisions.append(content_add("the nets mention."))
                for i, success in enumerate(multiset):
                    revisions.append(
                        content_add(f"reasoning number {i}.", er="reasoning", success=success)
                    )
                if not revisions:
                    revisions.append(content_add("a plain content addition."))

                first = select_rf(prev_ef, old, new, revisions, TOY_MATCHER, TH)
                second = select_rf(prev_ef, old, new, revisions, TOY_MATCHER, TH)
                assert first == second, "determinism"
                assert first.level in RF_LEVELS
                passing = [
                    g for g in first.trace
                    if g.passed and g.name.split(":")[0] in RF_LEVELS
                ]
                assert len(passing) == 1, (prev_ef, dnpe, dspc, topic_word, spc_word, multiset)
                assert replay_trace(first.trace) == first.level
                points += 1
            assert points == 3 * 3 * 5 * 2 * 2 * 4

            for name, prev_ef, old, new, revisions, expected in APPENDIX_PATHS:
                decision = select_rf(prev_ef, old, new, revisions, TOY_MATCHER, TH)
                assert decision.level == expected, name


def random_scoring_instance(rng: random.Random):
    vocabulary = [f"w{i}" for i in range(40)]
    keyword_pool = vocabulary[:14]
    dim = 6
    vectors = {
        w: [rng.uniform(-1.0, 1.0) for _ in range(dim)]
        for w in vocabulary
        if rng.random() < 0.8
    }
    topics = [
        (f"T{t}", rng.sample(keyword_pool, rng.randint(1, 3)))
        for t in range(rng.randint(1, 3))
    ]
    categories = [
        (f"C{c}", rng.sample(keyword_pool, rng.randint(1, 3)))
        for c in range(rng.randint(1, 3))
    ]
    text = " ".join(rng.choice(vocabulary) for _ in range(rng.randint(0, 200)))
    threshold = rng.choice([0.6, 0.9, 1.0])
    size = rng.choice([3, 8])
    stride = rng.choice([1, 2])
    return text, topics, categories, vectors, threshold, size, stride


class TestScoringOracleEquivalence:
    def test_thousand_random_documents(self):
        with criterion("Scoring oracle equivalence (1,000 randomized documents)", 60.0):
            rng = random.Random(20240501)
            for _ in range(1000):
                text, topics, categories, vectors, threshold, size, stride = (
                    random_scoring_instance(rng)
                )
                doc = segment(text)
                table = EmbeddingTable(6, vectors)
                topic_lex = TopicLexicon(
                    article_id="toy", topics=tuple((n, tuple(k)) for n, k in topics)
                )
                cat_lex = SpecificityLexicon(
                    article_id="toy", categories=tuple((n, tuple(k)) for n, k in categories)
                )
                expected_npe, expected_hits = brute_force_npe(
                    doc, topics, vectors, threshold, size, stride
                )
                npe, hits = compute_npe(
                    doc, topic_lex, table, threshold, window_size=size, stride=stride
                )
                assert npe == expected_npe
                assert {k: set(v) for k, v in hits.items()} == expected_hits
                expected_vector, expected_total = brute_force_spc(
                    doc, categories, vectors, threshold, size, stride
                )
                vector, total = compute_spc(
                    doc, cat_lex, table, threshold, window_size=size, stride=stride
                )
                assert list(vector) == expected_vector
                assert total == expected_total

    def test_threshold_one_orthogonal_equals_keyword_search(self):
        with criterion("Scoring reduces to plain keyword search at threshold 1.0", 10.0):
            rng = random.Random(20240502)
            vocabulary = [f"w{i}" for i in range(24)]
            vectors = {
                w: [1.0 if j == i else 0.0 for j in range(24)]
                for i, w in enumerate(vocabulary)
            }
            table = EmbeddingTable(24, vectors)
            for _ in range(200):
                topics = [
                    (f"T{t}", rng.sample(vocabulary[:10], rng.randint(1, 3)))
                    for t in range(rng.randint(1, 3))
                ]
                categories = [
                    (f"C{c}", rng.sample(vocabulary[:10], rng.randint(1, 3)))
                    for c in range(rng.randint(1, 3))
                ]
                doc = segment(" ".join(rng.choice(vocabulary) for _ in range(rng.randint(0, 120))))
                topic_lex = TopicLexicon(
                    article_id="toy", topics=tuple((n, tuple(k)) for n, k in topics)
                )
                cat_lex = SpecificityLexicon(
                    article_id="toy", categories=tuple((n, tuple(k)) for n, k in categories)
                )
                npe, _ = compute_npe(doc, topic_lex, table, 1.0)
                assert npe == keyword_search_npe(doc, topics)
                vector, _ = compute_spc(doc, cat_lex, table, 1.0)
                assert list(vector) == keyword_search_spc(doc, categories)


def unique_sentence(i: int) -> str:
    return f"Alpha{i} bravo{i} charlie{i} delta{i} echo{i}."


class TestAlignmentProperties:
    def test_identity_coverage_monotonicity_and_fuzz_recovery(self):
        with criterion("Alignment identity/coverage/monotonicity + k-edit recovery", 30.0):
            rng = random.Random(20240503)

            # Identity.
            for _ in range(20):
                doc = segment(" ".join(unique_sentence(i) for i in range(rng.randint(1, 10))))
                assert extract_revisions(align(doc, doc)) == []

            # Coverage, uniqueness, monotonicity on random unrelated drafts.
            pool = [unique_sentence(i) for i in range(16)]
            for _ in range(60):
                old_sentences = rng.sample(pool, rng.randint(0, 8))
                new_sentences = rng.sample(pool, rng.randint(0, 8))
                old = segment(" ".join(old_sentences))
                new = segment(" ".join(new_sentences))
                pairs = align(old, new)
                old_seen = sorted(p.old_index for p in pairs if p.old_index is not None)
                new_seen = sorted(p.new_index for p in pairs if p.new_index is not None)
                assert old_seen == list(range(len(old_sentences)))
                assert new_seen == list(range(len(new_sentences)))
                matches = [(p.old_index, p.new_index) for p in pairs if p.is_match()]
                for (i1, j1), (i2, j2) in zip(matches, matches[1:]):
                    assert i1 < i2 and j1 < j2

            # 100 random k-edit cases, k <= 5.
            for case in range(100):
                base_count = rng.randint(4, 10)
                base = [unique_sentence(i) for i in range(base_count)]
                k_deletes = rng.randint(0, 2)
                k_inserts = rng.randint(0, 5 - k_deletes)
                edited = list(base)
                for index in sorted(rng.sample(range(base_count), k_deletes), reverse=True):
                    del edited[index]
                for j in range(k_inserts):
                    edited.insert(rng.randint(0, len(edited)), unique_sentence(200 + j))
                revisions = extract_revisions(
                    align(segment(" ".join(base)), segment(" ".join(edited)))
                )
                actions = [r.action for r in revisions]
                assert actions.count("delete") == k_deletes, case
                assert actions.count("add") == k_inserts, case
                assert actions.count("modify") == 0, case


class TestMetricFidelity:
    def test_qwk_and_classifier_metrics_match_reference(self):
        with criterion("Metric fidelity vs independent re-implementation (1,000 vectors)", 30.0):
            rng = random.Random(20240504)
            for _ in range(1000):
                n = rng.randint(1, 60)
                a = [rng.randint(0, 4) for _ in range(n)]
                b = [rng.randint(0, 4) for _ in range(n)]
                assert abs(qwk(a, b) - qwk_reference(a, b)) < 1e-12

            for _ in range(1000):
                n = rng.randint(1, 60)
                pred = [rng.choice(["p", "n"]) for _ in range(n)]
                gold = [rng.choice(["p", "n"]) for _ in range(n)]
                report = classifier_metrics(pred, gold, positive="p", labels=["p", "n"])
                precision, recall, f1 = prf_reference(pred, gold, "p")
                assert abs(report.precision - precision) < 1e-12
                assert abs(report.recall - recall) < 1e-12
                assert abs(report.f1 - f1) < 1e-12

    def test_published_confusion_matrix_reproduces_overall_row(self):
        with criterion("Published confusion matrix reproduces 0.96/0.97/0.96 (+-0.005)", 1.0):
            report = metrics_from_confusion(
                [[268, 50], [37, 1170]], ["surface", "content"], positive="content"
            )
            assert report.precision == pytest.approx(0.96, abs=0.005)
            assert report.recall == pytest.approx(0.97, abs=0.005)
            assert report.f1 == pytest.approx(0.96, abs=0.005)


class TestDeltaReportFidelity:
    def test_means_109_to_249_reports_plus_128_percent(self):
        with criterion("Delta report: means 1.09 -> 2.49 formats to +128%", 1.0):
            old_values = [1] * 91 + [2] * 9
            new_values = [2] * 51 + [3] * 49
            pairs = [
                (make_score(o, 0), make_score(n, 0), "EF1")
                for o, n in zip(old_values, new_values)
            ]
            row = delta_analysis(pairs).rows[0]
            assert row.npe_old == pytest.approx(1.09)
            assert row.npe_new == pytest.approx(2.49)
            assert format_delta_pct(row.npe_delta_pct) == "+128%"


class TestEndToEndWorkflow:
    def test_demo_fixture_over_rest_is_byte_stable(self, tmp_path):
        from e2e_utils import GOLDEN_PATH, run_demo_workflow

        with criterion("End-to-end REST workflow, byte-stable golden output", 30.0):
            output = run_demo_workflow(str(tmp_path / "acceptance.sqlite"))
            golden = GOLDEN_PATH.read_text(encoding="utf-8")
            assert output == golden

            import json

            rows = json.loads(output)["workflow"]
            for student in ("alice", "bob"):
                kinds = [r["feedback_kind"] for r in rows if r["student"] == student]
                assert kinds == ["EF", "RF", "RF"], student


class TestMessageFidelity:
    def test_all_levels_byte_identical_to_transcription(self):
        with criterion("Message fidelity: EF1-EF3 and RF1-RF10 byte-identical", 1.0):
            assert render("EF1") == EXPECTED_MESSAGES["EF1"]
            assert render("EF1", highlighted=True) == EXPECTED_MESSAGES["EF1+highlight"]
            assert render("EF2") == EXPECTED_MESSAGES["EF2"]
            assert render("EF3") == EXPECTED_MESSAGES["EF3"]
            for i in range(1, 11):
                assert render(f"RF{i}") == EXPECTED_MESSAGES[f"RF{i}"]
