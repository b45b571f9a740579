"""Article lexicons: the expert keyword lists that parameterize scoring.

One JSON file per source article bundles the evidence topics, the
specificity categories, per-article matching parameters, the feedback
thresholds, and optional article text with highlightable topic spans.
Keyword lists are expert-editable data, not code; multi-word phrases are
split into single tokens at load because matching is token-level.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import InputFormatError
from .textcore import normalize_token

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class TopicLexicon:
    article_id: str
    topics: tuple[tuple[str, tuple[str, ...]], ...]

    def topic_names(self) -> list[str]:
        return [name for name, _ in self.topics]

    def keywords_for(self, topic: str) -> tuple[str, ...]:
        for name, keywords in self.topics:
            if name == topic:
                return keywords
        raise KeyError(topic)

    def all_keywords(self) -> set[str]:
        return {kw for _, keywords in self.topics for kw in keywords}


@dataclass(frozen=True)
class SpecificityLexicon:
    article_id: str
    categories: tuple[tuple[str, tuple[str, ...]], ...]

    def category_names(self) -> list[str]:
        return [name for name, _ in self.categories]

    def all_keywords(self) -> set[str]:
        return {kw for _, keywords in self.categories for kw in keywords}


@dataclass(frozen=True)
class HighlightSpan:
    topic: str
    start: int
    end: int


@dataclass(frozen=True)
class ArticleConfig:
    """Everything article-specific the pipeline needs, loaded from one file."""

    article_id: str
    topic_lexicon: TopicLexicon
    spec_lexicon: SpecificityLexicon
    window_size: int = 8
    stride: int = 1
    similarity_threshold: float = 0.9
    alpha: int = 2
    beta: int = 4
    gamma: int = 2
    article_text: str = ""
    highlight_spans: tuple[HighlightSpan, ...] = field(default_factory=tuple)

    def spans_for_topics(self, topics: list[str]) -> list[HighlightSpan]:
        wanted = set(topics)
        return [s for s in self.highlight_spans if s.topic in wanted]


def _normalize_keywords(raw: list[str], *, where: str, path: str) -> tuple[str, ...]:
    seen: set[str] = set()
    out: list[str] = []
    for phrase in raw:
        if not isinstance(phrase, str):
            raise InputFormatError(f"{where}: keyword {phrase!r} is not a string", path=path)
        for piece in phrase.split():
            norm = normalize_token(piece)
            if norm and norm not in seen:
                seen.add(norm)
                out.append(norm)
    if not out:
        raise InputFormatError(f"{where}: keyword list is empty after normalization", path=path)
    return tuple(out)


def _named_lists(
    entries: object, *, kind: str, path: str
) -> tuple[tuple[str, tuple[str, ...]], ...]:
    if not isinstance(entries, list) or not entries:
        raise InputFormatError(f"{kind} must be a non-empty list", path=path)
    names: set[str] = set()
    out: list[tuple[str, tuple[str, ...]]] = []
    for entry in entries:
        if not isinstance(entry, dict) or "name" not in entry or "keywords" not in entry:
            raise InputFormatError(
                f"each {kind} entry needs 'name' and 'keywords' fields", path=path
            )
        name = entry["name"]
        if name in names:
            raise InputFormatError(f"duplicate {kind} name {name!r}", path=path)
        names.add(name)
        out.append((name, _normalize_keywords(entry["keywords"], where=f"{kind} {name!r}", path=path)))
    return tuple(out)


def load_article_config(path: str | Path) -> ArticleConfig:
    """Load and validate one article lexicon file."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"invalid JSON: {exc.msg}", path=str(path), line=exc.lineno) from exc
    if not isinstance(data, dict):
        raise InputFormatError("top-level value must be an object", path=str(path))
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise InputFormatError(
            f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})", path=str(path)
        )
    article_id = data.get("article_id")
    if not isinstance(article_id, str) or not article_id:
        raise InputFormatError("article_id must be a non-empty string", path=str(path))

    topics = _named_lists(data.get("topics"), kind="topics", path=str(path))
    categories = _named_lists(data.get("categories"), kind="categories", path=str(path))

    article_text = data.get("article_text", "")
    spans: list[HighlightSpan] = []
    topic_names = {name for name, _ in topics}
    for raw in data.get("topic_highlight_spans", []):
        span = HighlightSpan(topic=raw["topic"], start=int(raw["start"]), end=int(raw["end"]))
        if span.topic not in topic_names:
            raise InputFormatError(
                f"highlight span references unknown topic {span.topic!r}", path=str(path)
            )
        if not (0 <= span.start < span.end <= len(article_text)):
            raise InputFormatError(
                f"highlight span [{span.start}, {span.end}) outside article text", path=str(path)
            )
        spans.append(span)

    def _positive_int(key: str, default: int) -> int:
        value = data.get(key, default)
        if not isinstance(value, int) or value < 1:
            raise InputFormatError(f"{key} must be a positive integer", path=str(path))
        return value

    def _threshold_int(key: str, default: int) -> int:
        value = data.get(key, default)
        if not isinstance(value, int) or value < 0:
            raise InputFormatError(f"{key} must be a non-negative integer", path=str(path))
        return value

    similarity = data.get("similarity_threshold", 0.9)
    if not isinstance(similarity, (int, float)) or not (0.0 < similarity <= 1.0):
        raise InputFormatError("similarity_threshold must be in (0, 1]", path=str(path))

    return ArticleConfig(
        article_id=article_id,
        topic_lexicon=TopicLexicon(article_id=article_id, topics=topics),
        spec_lexicon=SpecificityLexicon(article_id=article_id, categories=categories),
        window_size=_positive_int("window_size", 8),
        stride=_positive_int("stride", 1),
        similarity_threshold=float(similarity),
        alpha=_threshold_int("alpha", 2),
        beta=_threshold_int("beta", 4),
        gamma=_threshold_int("gamma", 2),
        article_text=article_text,
        highlight_spans=tuple(spans),
    )
