"""The two feedback decision trees.

Evidence-use feedback (EF1-EF3) is selected from a submitted draft's
indicators; revision feedback (RF1-RF10) is selected from the previous
draft's EF level, the indicator deltas, and the classified revisions.
Guard evaluation is strictly ordered and fully traced: every decision
carries the sequence of guards it evaluated with their operand values,
and the level can be re-derived from the trace alone.

Levels and guard structure are code; the message bullets are editable
JSON data so practitioners can revise wording without touching code.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping

from .alignment import ACTION_ADD, ACTION_DELETE, ACTION_MODIFY, RevisionPair
from .classifiers import LABEL_CONTENT, LABEL_REASONING, LABEL_SUCCESSFUL
from .errors import DomainError, InputFormatError
from .scoring import ArticleMatcher, EvidenceScore

EF_LEVELS = ("EF1", "EF2", "EF3")
RF_LEVELS = tuple(f"RF{i}" for i in range(1, 11))


@dataclass(frozen=True)
class Thresholds:
    """Expert-set cutoffs, loaded per article from the lexicon file."""

    alpha: int = 2
    beta: int = 4
    gamma: int = 2

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0 or self.gamma < 0:
            raise DomainError("thresholds must be non-negative")


@dataclass(frozen=True)
class GuardEval:
    name: str
    passed: bool
    operands: Mapping[str, object] = field(default_factory=dict)


@dataclass(frozen=True)
class FeedbackDecision:
    kind: str  # "EF" | "RF"
    level: str
    messages: tuple[str, ...]
    trace: tuple[GuardEval, ...]
    highlight_topics: tuple[str, ...] = ()


@dataclass(frozen=True)
class LevelMessages:
    name: str
    bullets: tuple[str, ...]
    highlight_bullets: tuple[str, ...] = ()


@dataclass(frozen=True)
class MessageTable:
    kind: str
    levels: Mapping[str, LevelMessages]


def load_message_table(path: str | Path) -> MessageTable:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"invalid JSON: {exc.msg}", path=str(path), line=exc.lineno) from exc
    return _table_from_dict(data, source=str(path))


def _table_from_dict(data: dict, *, source: str) -> MessageTable:
    try:
        kind = data["kind"]
        levels = {
            level: LevelMessages(
                name=entry.get("name", level),
                bullets=tuple(entry["bullets"]),
                highlight_bullets=tuple(entry.get("highlight_bullets", ())),
            )
            for level, entry in data["levels"].items()
        }
    except (KeyError, TypeError) as exc:
        raise InputFormatError(f"malformed message table: {exc}", path=source) from exc
    return MessageTable(kind=kind, levels=levels)


_DEFAULT_TABLES: dict[str, MessageTable] = {}


def default_message_table(kind: str) -> MessageTable:
    """The bundled EF or RF message table."""
    if kind not in ("EF", "RF"):
        raise DomainError(f"unknown message table kind {kind!r}")
    if kind not in _DEFAULT_TABLES:
        ref = resources.files("revisecoach.data.messages") / f"{kind.lower()}.json"
        data = json.loads(ref.read_text(encoding="utf-8"))
        _DEFAULT_TABLES[kind] = _table_from_dict(data, source=str(ref))
    return _DEFAULT_TABLES[kind]


def render(level: str, table: MessageTable | None = None, *, highlighted: bool = False) -> list[str]:
    """The level's bullets, verbatim from the table.

    Bullets gated on highlighting (EF1's re-read suggestion) are included
    only when ``highlighted`` is set.
    """
    if table is None:
        table = default_message_table("EF" if level.startswith("EF") else "RF")
    entry = table.levels.get(level)
    if entry is None:
        raise DomainError(f"unknown feedback level {level!r}")
    bullets = list(entry.bullets)
    if highlighted:
        bullets.extend(entry.highlight_bullets)
    return bullets


def replay_trace(trace: tuple[GuardEval, ...]) -> str:
    """Re-derive the selected level from a decision trace."""
    for entry in trace:
        level = entry.name.split(":", 1)[0]
        if entry.passed and (level in EF_LEVELS or level in RF_LEVELS):
            return level
    raise DomainError("trace contains no passing level guard")


def select_ef(
    score: EvidenceScore,
    th: Thresholds,
    *,
    message_table: MessageTable | None = None,
) -> FeedbackDecision:
    """Pick the evidence-use feedback level for one scored draft.

    The three guards partition the indicator plane: the first level when
    the topic count is at most alpha, the second when specificity is at
    most beta, the third otherwise. Missing-topic highlights attach only
    to the first level and only when the essay covers no more than half
    of the topics.
    """
    table = message_table or default_message_table("EF")
    trace: list[GuardEval] = []

    g1 = score.npe <= th.alpha
    trace.append(GuardEval("EF1:npe_at_most_alpha", g1, {"npe": score.npe, "alpha": th.alpha}))
    if g1:
        highlights: tuple[str, ...] = ()
        topic_count = len(score.topic_hits)
        if topic_count and score.npe <= topic_count // 2:
            highlights = tuple(score.missing())
        return FeedbackDecision(
            kind="EF",
            level="EF1",
            messages=tuple(render("EF1", table, highlighted=bool(highlights))),
            trace=tuple(trace),
            highlight_topics=highlights,
        )

    g2 = score.spc <= th.beta
    trace.append(GuardEval("EF2:spc_at_most_beta", g2, {"spc": score.spc, "beta": th.beta}))
    if g2:
        return FeedbackDecision("EF", "EF2", tuple(render("EF2", table)), tuple(trace))

    trace.append(GuardEval("EF3:residual", True, {"npe": score.npe, "spc": score.spc}))
    return FeedbackDecision("EF", "EF3", tuple(render("EF3", table)), tuple(trace))


def added_side_sentences(revisions: list[RevisionPair]) -> list[str]:
    """New-side texts of additions plus new sides of content modifies.

    These are the "added sentences" the revision-feedback guards inspect;
    surface modifies and deletions contribute nothing.
    """
    out: list[str] = []
    for rev in revisions:
        if rev.action == ACTION_ADD and rev.aligned.new_text:
            out.append(rev.aligned.new_text)
        elif (
            rev.action == ACTION_MODIFY
            and rev.type_label == LABEL_CONTENT
            and rev.aligned.new_text
        ):
            out.append(rev.aligned.new_text)
    return out


def select_rf(
    prev_ef: str,
    old: EvidenceScore,
    new: EvidenceScore,
    revisions: list[RevisionPair],
    matcher: ArticleMatcher,
    th: Thresholds,
    *,
    message_table: MessageTable | None = None,
) -> FeedbackDecision:
    """Pick the revision feedback level for a (previous, new) draft pair.

    Guards run in a fixed order: the no-attempt and surface-only checks
    first, then the branch selected by the EF level the previous draft
    received. Each branch ends in a residual guard, so exactly one level
    fires for every input.
    """
    if prev_ef not in EF_LEVELS:
        raise DomainError(f"unknown previous feedback level {prev_ef!r}")
    table = message_table or default_message_table("RF")
    trace: list[GuardEval] = []

    def decide(level: str) -> FeedbackDecision:
        return FeedbackDecision("RF", level, tuple(render(level, table)), tuple(trace))

    actions = [r.action for r in revisions]
    g1 = not revisions or all(a == ACTION_DELETE for a in actions)
    trace.append(
        GuardEval(
            "RF1:no_revisions_or_all_deletions",
            g1,
            {"revision_count": len(revisions), "actions": tuple(actions)},
        )
    )
    if g1:
        return decide("RF1")

    content = [r for r in revisions if r.type_label == LABEL_CONTENT]
    g2 = not content
    trace.append(GuardEval("RF2:no_content_revision", g2, {"content_count": len(content)}))
    if g2:
        return decide("RF2")

    added = added_side_sentences(revisions)
    dnpe = new.npe - old.npe
    dspc = new.spc - old.spc

    if prev_ef == "EF1":
        trace.append(GuardEval("branch:EF1", True, {"prev_ef": prev_ef}))
        old_topics = old.topics_hit()
        added_topics = [matcher.sentence_topics(s) for s in added]
        any_topic_word = any(added_topics)
        repeats_old_topic = any(topics & old_topics for topics in added_topics)

        g3 = dnpe == 0 and repeats_old_topic
        trace.append(
            GuardEval(
                "RF3:same_npe_and_added_topic_already_used",
                g3,
                {
                    "old_npe": old.npe,
                    "new_npe": new.npe,
                    "added_topics": sorted(set().union(*added_topics)) if added_topics else [],
                    "old_topics": sorted(old_topics),
                },
            )
        )
        if g3:
            return decide("RF3")

        g4 = dnpe <= 0 and not any_topic_word
        trace.append(
            GuardEval(
                "RF4:npe_not_increased_and_no_topic_words",
                g4,
                {"old_npe": old.npe, "new_npe": new.npe, "added_topic_words": any_topic_word},
            )
        )
        if g4:
            return decide("RF4")

        g5 = dnpe > 0 and dspc <= th.gamma
        trace.append(
            GuardEval(
                "RF5:npe_increased_and_spc_gain_at_most_gamma",
                g5,
                {"delta_npe": dnpe, "delta_spc": dspc, "gamma": th.gamma},
            )
        )
        if g5:
            return decide("RF5")

        trace.append(GuardEval("RF6:residual", True, {"delta_npe": dnpe, "delta_spc": dspc}))
        return decide("RF6")

    if prev_ef == "EF2":
        trace.append(GuardEval("branch:EF2", True, {"prev_ef": prev_ef}))
        added_spc_words = any(matcher.sentence_spc_keywords(s) for s in added)

        g4 = dspc <= th.gamma and not added_spc_words
        trace.append(
            GuardEval(
                "RF4:spc_gain_at_most_gamma_and_no_spc_words",
                g4,
                {"delta_spc": dspc, "gamma": th.gamma, "added_spc_words": added_spc_words},
            )
        )
        if g4:
            return decide("RF4")

        g5 = dspc <= th.gamma and added_spc_words
        trace.append(
            GuardEval(
                "RF5:spc_gain_at_most_gamma_with_spc_words",
                g5,
                {"delta_spc": dspc, "gamma": th.gamma, "added_spc_words": added_spc_words},
            )
        )
        if g5:
            return decide("RF5")

        trace.append(GuardEval("RF7:residual", True, {"delta_spc": dspc, "gamma": th.gamma}))
        return decide("RF7")

    trace.append(GuardEval("branch:EF3", True, {"prev_ef": prev_ef}))
    reasoning = [r for r in content if r.er_label == LABEL_REASONING]
    g8 = not reasoning
    trace.append(GuardEval("RF8:no_reasoning_revision", g8, {"reasoning_count": len(reasoning)}))
    if g8:
        return decide("RF8")

    successes = [r.success_label for r in reasoning]
    g10 = any(s == LABEL_SUCCESSFUL for s in successes)
    trace.append(
        GuardEval("RF10:some_successful_reasoning", g10, {"success_labels": tuple(successes)})
    )
    if g10:
        return decide("RF10")

    trace.append(GuardEval("RF9:residual", True, {"success_labels": tuple(successes)}))
    return decide("RF9")
