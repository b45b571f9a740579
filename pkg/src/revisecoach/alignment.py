"""Sentence alignment between consecutive drafts and revision extraction.

Drafts are aligned one-to-one with a monotone dynamic program that
maximizes total matched similarity minus a gap penalty per unmatched
sentence. Matches scoring below the floor are split into a deletion plus
an addition, so weakly related sentences are treated as replaced rather
than edited. Sentence splits and merges come out as delete+add pairs.

The similarity function is pluggable; the default is token-overlap,
which is deterministic and needs no model.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Callable
from dataclasses import dataclass, replace

from .textcore import Document, tokenize_sentence

SentenceSimilarity = Callable[[str, str], float]

ACTION_ADD = "add"
ACTION_DELETE = "delete"
ACTION_MODIFY = "modify"
ACTIONS = (ACTION_ADD, ACTION_DELETE, ACTION_MODIFY)

DEFAULT_GAP_PENALTY = 0.25
DEFAULT_MATCH_FLOOR = 0.5


@dataclass(frozen=True)
class AlignedPair:
    """One aligned slot: a match (both sides), deletion (old only), or
    addition (new only)."""

    old_index: int | None
    new_index: int | None
    old_text: str | None
    new_text: str | None
    similarity: float

    def is_match(self) -> bool:
        return self.old_index is not None and self.new_index is not None


@dataclass(frozen=True)
class RevisionPair:
    """A non-identical aligned pair, with classifier labels once assigned."""

    aligned: AlignedPair
    action: str
    type_label: str | None = None
    er_label: str | None = None
    success_label: str | None = None
    argument_context: str | None = None
    provenance: tuple[str, ...] = ()

    def old_text(self) -> str | None:
        return self.aligned.old_text

    def new_text(self) -> str | None:
        return self.aligned.new_text

    def with_labels(self, **kwargs) -> "RevisionPair":
        return replace(self, **kwargs)


def default_similarity(a: str, b: str) -> float:
    """Normalized token-multiset overlap: 2*|a ∩ b| / (|a| + |b|)."""
    ta = tokenize_sentence(a)
    tb = tokenize_sentence(b)
    if not ta and not tb:
        return 1.0 if a.strip() == b.strip() else 0.0
    overlap = sum((Counter(ta) & Counter(tb)).values())
    return 2.0 * overlap / (len(ta) + len(tb))


def align(
    old_doc: Document,
    new_doc: Document,
    sim: SentenceSimilarity = default_similarity,
    *,
    gap_penalty: float = DEFAULT_GAP_PENALTY,
    match_floor: float = DEFAULT_MATCH_FLOOR,
) -> list[AlignedPair]:
    """Monotone 1-1 alignment covering every sentence of both drafts.

    Ties in the dynamic program are broken toward the earliest match so
    output is deterministic. Matched pairs with similarity below
    ``match_floor`` are returned split as (delete, add).
    """
    old = old_doc.sentence_texts()
    new = new_doc.sentence_texts()
    m, n = len(old), len(new)

    sims = [[float(sim(old[i], new[j])) for j in range(n)] for i in range(m)]
    # A pair below the floor ends up split into delete+add, so inside the
    # DP it is worth exactly two gaps; scoring it by raw similarity would
    # bias the optimum toward matches that will not survive.
    split_cost = -2.0 * gap_penalty

    def pair_score(i: int, j: int) -> float:
        value = sims[i][j]
        return value if value >= match_floor else split_cost

    neg = float("-inf")
    score = [[neg] * (n + 1) for _ in range(m + 1)]
    score[0][0] = 0.0
    for i in range(1, m + 1):
        score[i][0] = -gap_penalty * i
    for j in range(1, n + 1):
        score[0][j] = -gap_penalty * j
    for i in range(1, m + 1):
        row = score[i]
        above = score[i - 1]
        for j in range(1, n + 1):
            row[j] = max(
                above[j - 1] + pair_score(i - 1, j - 1),
                above[j] - gap_penalty,
                row[j - 1] - gap_penalty,
            )

    # Traceback. Preferring the gap moves on ties pushes matches toward
    # the earliest sentences of both drafts; taking the new-side gap
    # first makes a replaced sentence come out as delete-then-add.
    pairs: list[AlignedPair] = []
    i, j = m, n
    while i > 0 or j > 0:
        current = score[i][j]
        if j > 0 and score[i][j - 1] - gap_penalty == current:
            j -= 1
            pairs.append(AlignedPair(None, j, None, new[j], 0.0))
        elif i > 0 and score[i - 1][j] - gap_penalty == current:
            i -= 1
            pairs.append(AlignedPair(i, None, old[i], None, 0.0))
        elif i > 0 and j > 0 and score[i - 1][j - 1] + pair_score(i - 1, j - 1) == current:
            i -= 1
            j -= 1
            pairs.append(AlignedPair(i, j, old[i], new[j], sims[i][j]))
        else:  # unreachable for a well-formed table
            raise AssertionError("alignment traceback lost the optimal path")
    pairs.reverse()

    out: list[AlignedPair] = []
    for pair in pairs:
        if pair.is_match() and pair.similarity < match_floor:
            out.append(AlignedPair(pair.old_index, None, pair.old_text, None, 0.0))
            out.append(AlignedPair(None, pair.new_index, None, pair.new_text, 0.0))
        else:
            out.append(pair)
    return out


def extract_revisions(pairs: list[AlignedPair]) -> list[RevisionPair]:
    """Drop identical matches and label the rest add/delete/modify.

    Order follows the alignment: new-draft order with deletions
    interleaved at their alignment position.
    """
    revisions: list[RevisionPair] = []
    for pair in pairs:
        if pair.is_match():
            if pair.old_text == pair.new_text:
                continue
            action = ACTION_MODIFY
        elif pair.old_index is not None:
            action = ACTION_DELETE
        else:
            action = ACTION_ADD
        revisions.append(RevisionPair(aligned=pair, action=action))
    return revisions


def align_and_extract(
    old_doc: Document,
    new_doc: Document,
    sim: SentenceSimilarity = default_similarity,
    *,
    gap_penalty: float = DEFAULT_GAP_PENALTY,
    match_floor: float = DEFAULT_MATCH_FLOOR,
) -> list[RevisionPair]:
    return extract_revisions(
        align(old_doc, new_doc, sim, gap_penalty=gap_penalty, match_floor=match_floor)
    )


def pairs_to_review_lines(pairs: list[AlignedPair]) -> list[str]:
    """Serialize an alignment to the line-oriented review format.

    Tab-separated: old_index, new_index, action, similarity, old text,
    new text. Indices are blank for one-sided pairs; action is "equal"
    for identical matches.
    """
    lines = []
    for pair in pairs:
        if pair.is_match():
            action = "equal" if pair.old_text == pair.new_text else ACTION_MODIFY
        elif pair.old_index is not None:
            action = ACTION_DELETE
        else:
            action = ACTION_ADD
        lines.append(
            "\t".join(
                [
                    "" if pair.old_index is None else str(pair.old_index),
                    "" if pair.new_index is None else str(pair.new_index),
                    action,
                    f"{pair.similarity:.4f}",
                    (pair.old_text or "").replace("\t", " "),
                    (pair.new_text or "").replace("\t", " "),
                ]
            )
        )
    return lines
