"""JSON-friendly views of scores, revisions, and feedback decisions.

The CLI and the REST service share these so a score serialized by one
is byte-identical under the other.
"""

from __future__ import annotations

from .alignment import RevisionPair
from .feedback import FeedbackDecision
from .scoring import EvidenceScore


def score_to_dict(score: EvidenceScore) -> dict:
    return {
        "article_id": score.article_id,
        "npe": score.npe,
        "topic_hits": {
            topic: sorted(list(span) for span in spans)
            for topic, spans in score.topic_hits.items()
        },
        "spc_vector": list(score.spc_vector),
        "spc": score.spc,
        "word_count": score.word_count,
        "holistic_score": score.holistic_score,
    }


def decision_to_dict(decision: FeedbackDecision) -> dict:
    return {
        "kind": decision.kind,
        "level": decision.level,
        "messages": list(decision.messages),
        "highlight_topics": list(decision.highlight_topics),
        "trace": [
            {
                "guard": entry.name,
                "passed": entry.passed,
                "operands": {k: _plain(v) for k, v in entry.operands.items()},
            }
            for entry in decision.trace
        ],
    }


def revision_to_dict(rev: RevisionPair) -> dict:
    return {
        "old_index": rev.aligned.old_index,
        "new_index": rev.aligned.new_index,
        "old_text": rev.aligned.old_text,
        "new_text": rev.aligned.new_text,
        "similarity": round(rev.aligned.similarity, 6),
        "action": rev.action,
        "type_label": rev.type_label,
        "er_label": rev.er_label,
        "success_label": rev.success_label,
        "argument_context": rev.argument_context,
        "provenance": list(rev.provenance),
    }


def revision_to_annotation_row(
    rev: RevisionPair, essay_id: str, grade: str, draft_from: int, draft_to: int
) -> list[str]:
    """One interchange-CSV row (machine labels) for an extracted revision."""
    return [
        essay_id,
        grade,
        str(draft_from),
        str(draft_to),
        "" if rev.aligned.old_index is None else str(rev.aligned.old_index),
        "" if rev.aligned.new_index is None else str(rev.aligned.new_index),
        rev.action,
        rev.type_label or "",
        rev.er_label or "",
        rev.success_label or "",
    ]


def _plain(value: object) -> object:
    if isinstance(value, (tuple, set, frozenset)):
        return sorted(value) if isinstance(value, (set, frozenset)) else list(value)
    return value
