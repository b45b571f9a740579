from __future__ import annotations

import random

import pytest

from oracles import best_alignment_score, multiset_overlap_similarity, optimal_alignments
from revisecoach.alignment import (
    AlignedPair,
    align,
    align_and_extract,
    default_similarity,
    extract_revisions,
    pairs_to_review_lines,
)
from revisecoach.textcore import segment, tokenize_sentence


def doc_of(*sentences: str):
    return segment(" ".join(sentences))


def unique_sentence(i: int) -> str:
    # Every token carries the index, so distinct sentences share nothing.
    return f"Alpha{i} bravo{i} charlie{i} delta{i} echo{i}."


class TestDefaultSimilarity:
    def test_identical(self):
        assert default_similarity("The same words.", "The same words.") == 1.0

    def test_disjoint(self):
        assert default_similarity("alpha beta", "gamma delta") == 0.0

    def test_four_of_five_overlap(self):
        a = "the hospital had no doctor"
        b = "the hospital had a doctor"
        assert default_similarity(a, b) == pytest.approx(0.8)

    def test_matches_reference_formula(self):
        rng = random.Random(3)
        words = ["a", "b", "c", "d", "e"]
        for _ in range(50):
            s1 = " ".join(rng.choices(words, k=rng.randint(0, 6)))
            s2 = " ".join(rng.choices(words, k=rng.randint(0, 6)))
            if not s1.strip() and not s2.strip():
                continue
            expected = multiset_overlap_similarity(tokenize_sentence(s1), tokenize_sentence(s2))
            assert default_similarity(s1, s2) == pytest.approx(expected)

    def test_symmetric(self):
        a, b = "one two three", "two three four five"
        assert default_similarity(a, b) == default_similarity(b, a)


class TestAlign:
    def test_identical_drafts(self):
        doc = doc_of(unique_sentence(0), unique_sentence(1), unique_sentence(2))
        pairs = align(doc, doc)
        assert len(pairs) == 3
        assert all(p.is_match() and p.similarity == 1.0 for p in pairs)
        assert extract_revisions(pairs) == []

    def test_appended_sentence(self):
        old = doc_of(unique_sentence(0), unique_sentence(1))
        new = doc_of(unique_sentence(0), unique_sentence(1), unique_sentence(9))
        revisions = extract_revisions(align(old, new))
        assert [r.action for r in revisions] == ["add"]
        assert revisions[0].new_text() == unique_sentence(9)

    def test_derived_three_by_four_instance(self):
        # sim(B, B') = 0.8 by construction; exhaustive enumeration over the
        # 3x4 instance confirms the expected pairing is optimal.
        a = "Alpha blocks run deep."
        b = "The hospital had no doctor."
        b2 = "The hospital had a doctor."
        c = "Carol keeps green gates."
        d = "Delta means entirely fresh content."
        old = doc_of(a, b, c)
        new = doc_of(a, b2, c, d)
        sims = [[default_similarity(x, y) for y in (a, b2, c, d)] for x in (a, b, c)]
        dp_pairs = align(old, new)
        matched = [(p.old_index, p.new_index) for p in dp_pairs if p.is_match()]
        assert matched == [(0, 0), (1, 1), (2, 2)]
        assert [(p.old_index, p.new_index) for p in dp_pairs] == [
            (0, 0), (1, 1), (2, 2), (None, 3),
        ]
        dp_score = sum(p.similarity for p in dp_pairs if p.is_match()) - 0.25
        assert dp_score == pytest.approx(best_alignment_score(sims, 0.25))
        revisions = extract_revisions(dp_pairs)
        assert [r.action for r in revisions] == ["modify", "add"]

    def test_low_similarity_match_splits(self):
        old = doc_of("Completely original thought here.")
        new = doc_of("Nothing shared with before whatsoever.")
        pairs = align(old, new)
        assert [(p.old_index, p.new_index) for p in pairs] == [(0, None), (None, 0)]
        revisions = extract_revisions(pairs)
        assert [r.action for r in revisions] == ["delete", "add"]

    def test_empty_documents(self):
        empty = segment("")
        full = doc_of(unique_sentence(0), unique_sentence(1))
        assert [p.new_index for p in align(empty, full)] == [0, 1]
        assert [p.old_index for p in align(full, empty)] == [0, 1]
        assert align(empty, empty) == []

    def test_matches_enumeration_on_random_instances(self):
        rng = random.Random(42)
        pool = [unique_sentence(i) for i in range(8)]
        for _ in range(60):
            m = rng.randint(0, 4)
            n = rng.randint(0, 4)
            old_sentences = rng.sample(pool, m)
            new_sentences = rng.sample(pool, n)
            old = doc_of(*old_sentences) if m else segment("")
            new = doc_of(*new_sentences) if n else segment("")
            sims = [
                [default_similarity(x, y) for y in new_sentences] for x in old_sentences
            ]
            pairs = align(old, new)
            # Score before the floor split: recompute from match indices.
            score = sum(
                sims[p.old_index][p.new_index] if p.is_match() else -0.25 for p in pairs
            )
            # Splitting a sub-floor match replaces one matched pair with two
            # gaps; undo that for score comparison against the raw DP
            # objective.
            raw_pairs = align(old, new, match_floor=0.0)
            raw_score = sum(
                sims[p.old_index][p.new_index] if p.is_match() else -0.25 for p in raw_pairs
            )
            if m and n:
                assert raw_score == pytest.approx(best_alignment_score(sims, 0.25))
            if m and n and len(optimal_alignments(sims, 0.25)) == 1:
                expected = optimal_alignments(sims, 0.25)[0]
                assert [(p.old_index, p.new_index) for p in raw_pairs] == expected


class TestInvariants:
    @staticmethod
    def _random_docs(rng, max_len=6):
        pool = [unique_sentence(i) for i in range(12)]
        old_sentences = rng.sample(pool, rng.randint(0, max_len))
        new_sentences = rng.sample(pool, rng.randint(0, max_len))
        return old_sentences, new_sentences

    def test_coverage_and_uniqueness(self):
        rng = random.Random(9)
        for _ in range(80):
            old_sentences, new_sentences = self._random_docs(rng)
            old = doc_of(*old_sentences) if old_sentences else segment("")
            new = doc_of(*new_sentences) if new_sentences else segment("")
            pairs = align(old, new)
            old_seen = [p.old_index for p in pairs if p.old_index is not None]
            new_seen = [p.new_index for p in pairs if p.new_index is not None]
            assert sorted(old_seen) == list(range(len(old_sentences)))
            assert sorted(new_seen) == list(range(len(new_sentences)))
            assert len(set(old_seen)) == len(old_seen)
            assert len(set(new_seen)) == len(new_seen)

    def test_monotonicity_no_crossings(self):
        rng = random.Random(10)
        for _ in range(80):
            old_sentences, new_sentences = self._random_docs(rng)
            old = doc_of(*old_sentences) if old_sentences else segment("")
            new = doc_of(*new_sentences) if new_sentences else segment("")
            matches = [(p.old_index, p.new_index) for p in align(old, new) if p.is_match()]
            for (i1, j1), (i2, j2) in zip(matches, matches[1:]):
                assert i1 < i2 and j1 < j2

    def test_identity_alignment(self):
        rng = random.Random(11)
        for _ in range(30):
            sentences = [unique_sentence(i) for i in range(rng.randint(1, 8))]
            doc = doc_of(*sentences)
            assert extract_revisions(align(doc, doc)) == []

    def test_action_symmetry(self):
        rng = random.Random(12)
        for _ in range(60):
            old_sentences, new_sentences = self._random_docs(rng)
            old = doc_of(*old_sentences) if old_sentences else segment("")
            new = doc_of(*new_sentences) if new_sentences else segment("")
            forward = extract_revisions(align(old, new))
            backward = extract_revisions(align(new, old))
            fwd = {a: sum(1 for r in forward if r.action == a) for a in ("add", "delete", "modify")}
            bwd = {a: sum(1 for r in backward if r.action == a) for a in ("add", "delete", "modify")}
            assert fwd["add"] == bwd["delete"]
            assert fwd["delete"] == bwd["add"]
            assert fwd["modify"] == bwd["modify"]

    def test_fuzz_recovery_of_random_edits(self):
        rng = random.Random(13)
        for _ in range(40):
            base_count = rng.randint(3, 8)
            base = [unique_sentence(i) for i in range(base_count)]
            k_deletes = rng.randint(0, min(2, base_count))
            k_inserts = rng.randint(0, 3)
            edited = list(base)
            delete_targets = rng.sample(range(base_count), k_deletes)
            edited = [s for idx, s in enumerate(edited) if idx not in delete_targets]
            for j in range(k_inserts):
                position = rng.randint(0, len(edited))
                edited.insert(position, unique_sentence(100 + j))
            old = doc_of(*base)
            new = doc_of(*edited) if edited else segment("")
            revisions = extract_revisions(align(old, new))
            actions = [r.action for r in revisions]
            assert actions.count("delete") == k_deletes
            assert actions.count("add") == k_inserts
            assert actions.count("modify") == 0


class TestExtractRevisions:
    def test_preserves_alignment_order(self):
        old = doc_of(unique_sentence(0), unique_sentence(1), unique_sentence(2))
        new = doc_of(unique_sentence(0), unique_sentence(5), unique_sentence(2))
        revisions = extract_revisions(align(old, new))
        # Unique sentences share no tokens, so the middle match splits.
        assert [r.action for r in revisions] == ["delete", "add"]
        assert revisions[0].old_text() == unique_sentence(1)
        assert revisions[1].new_text() == unique_sentence(5)

    def test_table_like_mixed_actions(self, mvp_matcher):
        # A draft pair shaped like the annotated example: one meaning
        # change, one deletion, one addition, one punctuation-only fix.
        old = doc_of(
            "The author proved the point about the fight.",
            "She showed how they got more food and water supply improved.",
            "Although some countries are having wars right now, we are still one big team.",
            'I know this because the author said, "water is connected to the hospital.',
        )
        new = doc_of(
            "The author proved the point about the fight.",
            "She showed how they got more food and medication became affordable.",
            "First, they did it by making medication more affordable.",
            'I know this because the author said, "water is connected to the hospital."',
        )
        revisions = align_and_extract(old, new)
        assert [r.action for r in revisions] == ["modify", "delete", "add", "modify"]

    def test_review_lines_format(self):
        old = doc_of(unique_sentence(0), unique_sentence(1))
        new = doc_of(unique_sentence(0), unique_sentence(1), unique_sentence(2))
        lines = pairs_to_review_lines(align(old, new))
        assert lines[0].split("\t")[:4] == ["0", "0", "equal", "1.0000"]
        assert lines[2].split("\t")[:3] == ["", "2", "add"]

    def test_modify_requires_differing_texts(self):
        pair = AlignedPair(0, 0, "same", "same", 1.0)
        assert extract_revisions([pair]) == []
