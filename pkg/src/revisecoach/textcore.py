"""Deterministic text preprocessing shared by scoring and alignment.

Normalization, sentence segmentation, tokenization, and sliding windows.
Everything here is pure and rule-based: identical input yields identical
output on every platform, which keeps golden files and classroom records
stable. Sentence and token spans always index into the original raw text,
so downstream highlighting never drifts.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass

_TERMINALS = frozenset(".!?")
# Closing quotes/brackets that may trail the terminal punctuation.
_CLOSERS = frozenset("\"')]}’”")

# Words ending in a period that do not close a sentence.
_ABBREVIATIONS = frozenset(
    {
        "mr.", "mrs.", "ms.", "dr.", "prof.", "rev.", "gen.", "sen.",
        "st.", "mt.", "jr.", "sr.", "co.", "inc.", "ltd.",
        "u.s.", "u.n.", "u.k.", "d.c.", "a.m.", "p.m.",
        "e.g.", "i.e.", "etc.", "vs.", "cf.", "approx.", "dept.",
        "est.", "fig.", "no.", "vol.",
    }
)

_CHUNK_RE = re.compile(r"\S+")


@dataclass(frozen=True)
class Token:
    """One whitespace-delimited chunk of the raw text.

    ``normalized`` is empty only for pure-punctuation chunks; those are
    excluded from windows and word counts.
    """

    surface: str
    normalized: str
    char_span: tuple[int, int]
    sentence_index: int


@dataclass(frozen=True)
class Sentence:
    text: str
    char_span: tuple[int, int]


@dataclass(frozen=True)
class Document:
    raw_text: str
    sentences: tuple[Sentence, ...]
    tokens: tuple[Token, ...]

    def content_tokens(self) -> list[Token]:
        return [t for t in self.tokens if t.normalized]

    def word_count(self) -> int:
        return sum(1 for t in self.tokens if t.normalized)

    def sentence_texts(self) -> list[str]:
        return [s.text for s in self.sentences]


@dataclass(frozen=True)
class Window:
    tokens: tuple[Token, ...]
    start_token_index: int

    def char_span(self) -> tuple[int, int]:
        return (self.tokens[0].char_span[0], self.tokens[-1].char_span[1])


def normalize_token(chunk: str) -> str:
    """Normalize one token: NFC, case-fold, strip edge punctuation.

    Interior characters are kept as-is, so hyphens, apostrophes, and the
    comma in "20,000" survive. Returns "" for pure-punctuation chunks.
    """
    folded = unicodedata.normalize("NFC", chunk).casefold()
    start = 0
    end = len(folded)
    while start < end and not folded[start].isalnum():
        start += 1
    while end > start and not folded[end - 1].isalnum():
        end -= 1
    return folded[start:end]


def _is_abbreviation(text: str, dot_index: int) -> bool:
    start = dot_index
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    word = text[start : dot_index + 1].casefold()
    word = word.lstrip("\"'([{‘“")
    return word in _ABBREVIATIONS


def _emit(text: str, start: int, end: int, out: list[Sentence]) -> None:
    while start < end and text[start].isspace():
        start += 1
    while end > start and text[end - 1].isspace():
        end -= 1
    if end > start:
        out.append(Sentence(text=text[start:end], char_span=(start, end)))


def segment(raw_text: str) -> Document:
    """Split raw text into sentences and tokens with exact char offsets.

    Boundaries: terminal punctuation (., !, ?) followed by whitespace,
    plus hard line breaks. A fixed abbreviation list suppresses false
    boundaries after "Dr.", "U.S.", and the like. Empty input yields a
    document with no sentences and no tokens.
    """
    sentences: list[Sentence] = []
    n = len(raw_text)
    start = 0
    i = 0
    while i < n:
        ch = raw_text[i]
        if ch == "\n":
            _emit(raw_text, start, i, sentences)
            start = i + 1
            i += 1
            continue
        if ch in _TERMINALS:
            j = i + 1
            while j < n and raw_text[j] in _TERMINALS:
                j += 1
            while j < n and raw_text[j] in _CLOSERS:
                j += 1
            at_break = j >= n or raw_text[j].isspace()
            is_abbrev = ch == "." and (j - i) == 1 and _is_abbreviation(raw_text, i)
            if at_break and not is_abbrev:
                _emit(raw_text, start, j, sentences)
                start = j
            i = j
            continue
        i += 1
    _emit(raw_text, start, n, sentences)

    tokens: list[Token] = []
    for si, sentence in enumerate(sentences):
        s0 = sentence.char_span[0]
        for m in _CHUNK_RE.finditer(sentence.text):
            chunk = m.group(0)
            tokens.append(
                Token(
                    surface=chunk,
                    normalized=normalize_token(chunk),
                    char_span=(s0 + m.start(), s0 + m.end()),
                    sentence_index=si,
                )
            )
    return Document(raw_text=raw_text, sentences=tuple(sentences), tokens=tuple(tokens))


def windows(doc: Document, size: int = 8, stride: int = 1) -> list[Window]:
    """Slide a fixed-size window over the document's content tokens.

    Returns ceil(max(0, T - size) / stride) + 1 windows over the T content
    tokens; a single all-token window when 0 < T <= size; none when T = 0.
    Windows never cross the document end: with stride > 1 the final window
    snaps back to start T - size so the tail tokens stay covered.
    """
    if size < 1:
        raise ValueError(f"window size must be >= 1, got {size}")
    if stride < 1:
        raise ValueError(f"window stride must be >= 1, got {stride}")
    content = doc.content_tokens()
    total = len(content)
    if total == 0:
        return []
    if total <= size:
        return [Window(tokens=tuple(content), start_token_index=0)]
    starts = list(range(0, total - size + 1, stride))
    if starts[-1] != total - size:
        starts.append(total - size)
    return [Window(tokens=tuple(content[s : s + size]), start_token_index=s) for s in starts]


def tokenize_sentence(text: str) -> list[str]:
    """Normalized content tokens of a standalone sentence string."""
    return [norm for chunk in _CHUNK_RE.findall(text) if (norm := normalize_token(chunk))]
