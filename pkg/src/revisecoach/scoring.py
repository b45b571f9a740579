"""Evidence-use scoring indicators.

Two indicators drive all feedback:

* the evidence-topic count — how many expert-defined topics the essay
  touches (breadth), detected by sliding a fixed-size window over the
  content tokens and checking each window against per-topic keywords;
* the specificity total — per category, the number of distinct specific
  example keywords any window hits (depth), summed over categories.

A window matches a keyword list when some window token equals a keyword
exactly, or when both token and keyword have embedding vectors whose
cosine similarity meets the threshold. Exact string equality matches
even for tokens missing from the embedding table, so out-of-vocabulary
lexicon words still match themselves.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

from .embeddings import EmbeddingTable
from .errors import DomainError
from .lexicon import ArticleConfig, SpecificityLexicon, TopicLexicon
from .textcore import Document, Window, tokenize_sentence, windows

Span = tuple[int, int]

# Optional holistic 1..4 scorer supplied by a trained-model plugin.
HolisticScorer = Callable[[Document], int]


@dataclass(frozen=True)
class EvidenceScore:
    """Scoring result for one draft against one article's lexicons."""

    article_id: str
    npe: int
    topic_hits: Mapping[str, frozenset[Span]]
    spc_vector: tuple[int, ...]
    spc: int
    word_count: int
    holistic_score: int | None = None

    def topics_hit(self) -> set[str]:
        return {name for name, hits in self.topic_hits.items() if hits}

    def missing(self) -> list[str]:
        return [name for name, hits in self.topic_hits.items() if not hits]


class KeywordMatcher:
    """Token-vs-keyword matching under one embedding table and threshold.

    Matching is memoized per (token, keyword) pair; the matcher is
    immutable apart from that cache and safe to share across threads.
    """

    def __init__(self, table: EmbeddingTable, threshold: float = 0.9):
        if not (0.0 < threshold <= 1.0):
            raise ValueError(f"threshold must be in (0, 1], got {threshold}")
        self.table = table
        self.threshold = threshold
        self._cache: dict[tuple[str, str], bool] = {}

    def token_matches(self, token: str, keyword: str) -> bool:
        if token == keyword:
            return True
        key = (token, keyword)
        hit = self._cache.get(key)
        if hit is None:
            sim = self.table.cosine(token, keyword)
            hit = sim is not None and sim >= self.threshold
            self._cache[key] = hit
        return hit

    def matched_keywords(self, tokens: Iterable[str], keywords: Iterable[str]) -> set[str]:
        """Keywords matched by at least one of the given normalized tokens."""
        token_set = set(tokens)
        return {kw for kw in keywords if any(self.token_matches(t, kw) for t in token_set)}


def match_window(
    window: Window,
    keywords: list[str],
    table: EmbeddingTable,
    threshold: float = 0.9,
    *,
    matcher: KeywordMatcher | None = None,
) -> bool:
    """True when some window token matches some keyword."""
    matcher = matcher or KeywordMatcher(table, threshold)
    return any(
        matcher.token_matches(token.normalized, kw) for token in window.tokens for kw in keywords
    )


def _window_keyword_hits(
    doc_windows: list[Window],
    keywords: list[str],
    matcher: KeywordMatcher,
) -> dict[str, list[Window]]:
    """Map each keyword to the windows that match it.

    Token matches are window-independent, so they are resolved once per
    distinct token and then swept across windows.
    """
    distinct = sorted({t.normalized for w in doc_windows for t in w.tokens})
    token_hits: dict[str, set[str]] = {
        tok: {kw for kw in keywords if matcher.token_matches(tok, kw)} for tok in distinct
    }
    out: dict[str, list[Window]] = {kw: [] for kw in keywords}
    for window in doc_windows:
        hit_here: set[str] = set()
        for token in window.tokens:
            hit_here |= token_hits[token.normalized]
        for kw in hit_here:
            out[kw].append(window)
    return out


def compute_npe(
    doc: Document,
    lexicon: TopicLexicon,
    table: EmbeddingTable,
    threshold: float = 0.9,
    *,
    window_size: int = 8,
    stride: int = 1,
) -> tuple[int, dict[str, frozenset[Span]]]:
    """Count evidence topics mentioned, with the matching window spans.

    A topic counts when any window matches any of its keywords; the
    returned map has one entry per topic (empty set when unmatched), in
    lexicon order.
    """
    matcher = KeywordMatcher(table, threshold)
    doc_windows = windows(doc, size=window_size, stride=stride)
    topic_hits: dict[str, frozenset[Span]] = {}
    for name, keywords in lexicon.topics:
        by_keyword = _window_keyword_hits(doc_windows, list(keywords), matcher)
        spans = {w.char_span() for hits in by_keyword.values() for w in hits}
        topic_hits[name] = frozenset(spans)
    npe = sum(1 for spans in topic_hits.values() if spans)
    return npe, topic_hits


def compute_spc(
    doc: Document,
    lexicon: SpecificityLexicon,
    table: EmbeddingTable,
    threshold: float = 0.9,
    *,
    window_size: int = 8,
    stride: int = 1,
) -> tuple[tuple[int, ...], int]:
    """Per-category counts of distinct keywords matched by any window.

    Repeating one keyword many times still counts it once; the total is
    the sum of the per-category counts.
    """
    matcher = KeywordMatcher(table, threshold)
    doc_windows = windows(doc, size=window_size, stride=stride)
    vector: list[int] = []
    for _, keywords in lexicon.categories:
        by_keyword = _window_keyword_hits(doc_windows, list(keywords), matcher)
        vector.append(sum(1 for hits in by_keyword.values() if hits))
    return tuple(vector), sum(vector)


def score_draft(
    doc: Document,
    topic_lexicon: TopicLexicon,
    spec_lexicon: SpecificityLexicon,
    table: EmbeddingTable,
    threshold: float = 0.9,
    *,
    window_size: int = 8,
    stride: int = 1,
    holistic_scorer: HolisticScorer | None = None,
) -> EvidenceScore:
    """Compose the indicators into one score record for a draft."""
    if topic_lexicon.article_id != spec_lexicon.article_id:
        raise DomainError(
            "topic and specificity lexicons belong to different articles: "
            f"{topic_lexicon.article_id!r} vs {spec_lexicon.article_id!r}"
        )
    npe, topic_hits = compute_npe(
        doc, topic_lexicon, table, threshold, window_size=window_size, stride=stride
    )
    spc_vector, spc = compute_spc(
        doc, spec_lexicon, table, threshold, window_size=window_size, stride=stride
    )
    holistic: int | None = None
    if holistic_scorer is not None:
        holistic = int(holistic_scorer(doc))
        if not 1 <= holistic <= 4:
            raise DomainError(f"holistic score must be in 1..4, got {holistic}")
    return EvidenceScore(
        article_id=topic_lexicon.article_id,
        npe=npe,
        topic_hits=MappingProxyType(dict(topic_hits)),
        spc_vector=spc_vector,
        spc=spc,
        word_count=doc.word_count(),
        holistic_score=holistic,
    )


def score_with_config(
    doc: Document,
    config: ArticleConfig,
    table: EmbeddingTable,
    *,
    holistic_scorer: HolisticScorer | None = None,
) -> EvidenceScore:
    return score_draft(
        doc,
        config.topic_lexicon,
        config.spec_lexicon,
        table,
        config.similarity_threshold,
        window_size=config.window_size,
        stride=config.stride,
        holistic_scorer=holistic_scorer,
    )


def missing_topics(score: EvidenceScore, lexicon: TopicLexicon) -> list[str]:
    """Topics with no matching window, in lexicon order.

    Callers highlight these in the article only when the topic count
    covers no more than half of the topics.
    """
    if score.article_id != lexicon.article_id:
        raise DomainError(
            f"score was computed for article {score.article_id!r}, not {lexicon.article_id!r}"
        )
    return [name for name, _ in lexicon.topics if not score.topic_hits.get(name)]


def highlight_topics(score: EvidenceScore, lexicon: TopicLexicon) -> list[str]:
    """Missing topics when highlighting applies, else empty.

    Highlighting applies only when the essay covers no more than half of
    the article's topics.
    """
    if score.npe <= len(lexicon.topics) // 2:
        return missing_topics(score, lexicon)
    return []


class ArticleMatcher:
    """Sentence-level keyword checks shared by classifiers and feedback guards."""

    def __init__(self, config: ArticleConfig, table: EmbeddingTable):
        self.config = config
        self.matcher = KeywordMatcher(table, config.similarity_threshold)
        self._topic_keywords = {name: list(kws) for name, kws in config.topic_lexicon.topics}
        self._spc_keywords = sorted(config.spec_lexicon.all_keywords())
        self._all_keywords = sorted(
            config.topic_lexicon.all_keywords() | config.spec_lexicon.all_keywords()
        )

    def sentence_topics(self, sentence: str) -> set[str]:
        """Topic names whose keywords the sentence matches."""
        tokens = tokenize_sentence(sentence)
        return {
            name
            for name, keywords in self._topic_keywords.items()
            if self.matcher.matched_keywords(tokens, keywords)
        }

    def sentence_spc_keywords(self, sentence: str) -> set[str]:
        return self.matcher.matched_keywords(tokenize_sentence(sentence), self._spc_keywords)

    def sentence_keywords(self, sentence: str) -> set[str]:
        """All lexicon keywords (topic and specificity) the sentence matches."""
        return self.matcher.matched_keywords(tokenize_sentence(sentence), self._all_keywords)

    def document_keywords(self, doc: Document) -> set[str]:
        """All lexicon keywords matched by any window of the document."""
        doc_windows = windows(doc, size=self.config.window_size, stride=self.config.stride)
        tokens = {t.normalized for w in doc_windows for t in w.tokens}
        return self.matcher.matched_keywords(tokens, self._all_keywords)
