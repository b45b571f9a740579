"""Three-stage revision classification behind one classifier contract.

Stage 1 splits revisions into surface (meaning-preserving) and content
(meaning-altering); stage 2 splits content revisions into evidence vs
reasoning; stage 3 judges content revisions successful or unsuccessful.
Surface revisions never reach stages 2 and 3.

Every stage is a Classifier: a named, label-spaced object whose
``classify`` returns a Prediction. The bundled baselines are
deterministic keyword/overlap rules so the pipeline runs with no model
weights and no network; adapters for trained encoders and a remote chat
endpoint plug into the same contract and fall back to a baseline when
the endpoint misbehaves, flagging the label's provenance.
"""

from __future__ import annotations

import hashlib
import os
import threading
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Protocol, runtime_checkable

import httpx

from .alignment import ACTION_ADD, ACTION_DELETE, RevisionPair
from .errors import DomainError
from .scoring import ArticleMatcher
from .textcore import Document, tokenize_sentence

LABEL_SURFACE = "surface"
LABEL_CONTENT = "content"
LABEL_EVIDENCE = "evidence"
LABEL_REASONING = "reasoning"
LABEL_SUCCESSFUL = "successful"
LABEL_UNSUCCESSFUL = "unsuccessful"

CONTENT_LABELS = (LABEL_SURFACE, LABEL_CONTENT)
EVIDENCE_LABELS = (LABEL_EVIDENCE, LABEL_REASONING)
SUCCESS_LABELS = (LABEL_SUCCESSFUL, LABEL_UNSUCCESSFUL)

# Instruction sent to the chat endpoint for the evidence/reasoning stage.
EVIDENCE_CHAT_PROMPT = (
    "You need to identify whether the given sentence is an evidence or "
    "reasoning sentence. Your output should be chosen from the list "
    "[evidence, reasoning]"
)


@dataclass(frozen=True)
class Prediction:
    label: str
    confidence: float
    note: str | None = None


@runtime_checkable
class Classifier(Protocol):
    name: str
    label_space: tuple[str, ...]
    deterministic: bool

    def classify(self, rev: RevisionPair, context: str | None = None) -> Prediction: ...


def relevant_text(rev: RevisionPair) -> str:
    """The side a classifier should look at: new text, old for deletions."""
    if rev.action == ACTION_DELETE:
        return rev.aligned.old_text or ""
    return rev.aligned.new_text or ""


def _edit_distance_at_most_one(a: str, b: str) -> bool:
    if a == b:
        return True
    la, lb = len(a), len(b)
    if abs(la - lb) > 1:
        return False
    if la > lb:
        a, b, la, lb = b, a, lb, la
    # la <= lb; allow one substitution (equal length) or one insertion.
    i = j = 0
    used = False
    while i < la and j < lb:
        if a[i] == b[j]:
            i += 1
            j += 1
            continue
        if used:
            return False
        used = True
        if la == lb:
            i += 1
        j += 1
    return True


class SurfaceContentBaseline:
    """Rule baseline for stage 1.

    Additions and deletions alter meaning, so they are content. A modify
    is surface when the normalized content-token multisets agree, allowing
    token pairs within edit distance one (typo fixes); anything else is
    content.
    """

    name = "content-baseline"
    label_space = CONTENT_LABELS
    deterministic = True

    def classify(self, rev: RevisionPair, context: str | None = None) -> Prediction:
        if rev.action in (ACTION_ADD, ACTION_DELETE):
            return Prediction(LABEL_CONTENT, 1.0)
        old = Counter(tokenize_sentence(rev.aligned.old_text or ""))
        new = Counter(tokenize_sentence(rev.aligned.new_text or ""))
        if old == new:
            return Prediction(LABEL_SURFACE, 1.0)
        left = list((old - new).elements())
        right = list((new - old).elements())
        if len(left) == len(right):
            remaining = list(right)
            for token in left:
                for candidate in remaining:
                    if _edit_distance_at_most_one(token, candidate):
                        remaining.remove(candidate)
                        break
                else:
                    return Prediction(LABEL_CONTENT, 1.0)
            return Prediction(LABEL_SURFACE, 1.0)
        return Prediction(LABEL_CONTENT, 1.0)


class EvidenceReasoningBaseline:
    """Rule baseline for stage 2: keyword-bearing sentences are evidence."""

    name = "evidence-baseline"
    label_space = EVIDENCE_LABELS
    deterministic = True

    def __init__(self, matcher: ArticleMatcher):
        self._matcher = matcher

    def classify(self, rev: RevisionPair, context: str | None = None) -> Prediction:
        if self._matcher.sentence_keywords(relevant_text(rev)):
            return Prediction(LABEL_EVIDENCE, 1.0)
        return Prediction(LABEL_REASONING, 1.0)


class SuccessBaseline:
    """Rule baseline for stage 3.

    An addition succeeds when it brings in a lexicon keyword the old
    draft had not used; a deletion succeeds when the removed sentence
    carried no lexicon keyword at all. Everything else is unsuccessful.
    """

    name = "success-baseline"
    label_space = SUCCESS_LABELS
    deterministic = True

    def __init__(self, matcher: ArticleMatcher, used_keywords: set[str] | None = None):
        self._matcher = matcher
        self._used = frozenset(used_keywords or ())

    def with_used_keywords(self, used: set[str]) -> "SuccessBaseline":
        return SuccessBaseline(self._matcher, used)

    def classify(self, rev: RevisionPair, context: str | None = None) -> Prediction:
        hits = self._matcher.sentence_keywords(relevant_text(rev))
        if rev.action == ACTION_ADD and hits - self._used:
            return Prediction(LABEL_SUCCESSFUL, 1.0)
        if rev.action == ACTION_DELETE and not hits:
            return Prediction(LABEL_SUCCESSFUL, 1.0)
        return Prediction(LABEL_UNSUCCESSFUL, 1.0)


class FunctionClassifier:
    """Adapter wrapping any (rev, context) -> label callable.

    This is the slot trained encoder models plug into; the wrapped
    callable owns its own weights and device placement.
    """

    def __init__(
        self,
        name: str,
        label_space: tuple[str, ...],
        fn: Callable[[RevisionPair, str | None], tuple[str, float]],
        deterministic: bool = False,
    ):
        self.name = name
        self.label_space = label_space
        self.deterministic = deterministic
        self._fn = fn

    def classify(self, rev: RevisionPair, context: str | None = None) -> Prediction:
        label, confidence = self._fn(rev, context)
        if label not in self.label_space:
            raise DomainError(f"classifier {self.name!r} returned unknown label {label!r}")
        return Prediction(label, confidence)


class RemoteChatClassifier:
    """Chat-endpoint adapter with caching, one retry, and baseline fallback.

    Requests go to ``{base_url}/chat/completions`` with a single user
    message at temperature 0. Responses are accepted only when exactly
    one label from the label space appears; otherwise the fallback
    baseline answers and the prediction is flagged. Responses are cached
    by (prompt, input) hash so repeated runs are deterministic and cheap.
    """

    ENV_BASE_URL = "REVISECOACH_CHAT_BASE_URL"
    ENV_API_KEY = "REVISECOACH_CHAT_API_KEY"
    ENV_MODEL = "REVISECOACH_CHAT_MODEL"

    def __init__(
        self,
        name: str,
        label_space: tuple[str, ...],
        prompt: str,
        fallback: Classifier,
        *,
        base_url: str | None = None,
        api_key: str | None = None,
        model: str | None = None,
        timeout: float = 10.0,
        max_inflight: int = 4,
        transport: httpx.BaseTransport | None = None,
    ):
        self.name = name
        self.label_space = label_space
        self.deterministic = False
        self.prompt = prompt
        self._fallback = fallback
        self._base_url = base_url or os.environ.get(self.ENV_BASE_URL, "")
        self._api_key = api_key or os.environ.get(self.ENV_API_KEY, "")
        self._model = model or os.environ.get(self.ENV_MODEL, "gpt-3.5-turbo")
        self._timeout = timeout
        self._semaphore = threading.Semaphore(max_inflight)
        self._cache: dict[str, Prediction] = {}
        self._cache_lock = threading.Lock()
        self._transport = transport

    def _cache_key(self, text: str) -> str:
        return hashlib.sha256(f"{self.prompt}\x00{text}".encode("utf-8")).hexdigest()

    def _request(self, text: str) -> str:
        headers = {"Content-Type": "application/json"}
        if self._api_key:
            headers["Authorization"] = f"Bearer {self._api_key}"
        payload = {
            "model": self._model,
            "temperature": 0,
            "messages": [{"role": "user", "content": f"{self.prompt}\n\nSentence: {text}"}],
        }
        with httpx.Client(
            base_url=self._base_url, timeout=self._timeout, transport=self._transport
        ) as client:
            response = client.post("/chat/completions", json=payload, headers=headers)
            response.raise_for_status()
            body = response.json()
        return body["choices"][0]["message"]["content"]

    def _parse(self, raw: str) -> str | None:
        text = raw.strip().casefold()
        found = [label for label in self.label_space if label in text]
        if len(found) == 1:
            return found[0]
        return None

    def classify(self, rev: RevisionPair, context: str | None = None) -> Prediction:
        text = relevant_text(rev)
        key = self._cache_key(text)
        with self._cache_lock:
            cached = self._cache.get(key)
        if cached is not None:
            return cached
        if not self._base_url:
            fallback = self._fallback.classify(rev, context)
            return Prediction(fallback.label, fallback.confidence, note="fallback:not-configured")
        label: str | None = None
        error = "unparseable"
        with self._semaphore:
            for _ in range(2):  # one retry
                try:
                    label = self._parse(self._request(text))
                    if label is not None:
                        break
                except (httpx.HTTPError, KeyError, IndexError, ValueError) as exc:
                    error = type(exc).__name__
        if label is None:
            fallback = self._fallback.classify(rev, context)
            return Prediction(fallback.label, fallback.confidence, note=f"fallback:{error}")
        prediction = Prediction(label, 1.0)
        with self._cache_lock:
            self._cache[key] = prediction
        return prediction


def extract_argument_context(essay: Document, rev: RevisionPair) -> str:
    """Surrounding sentences of the revision site, for the success stage.

    The site is the new-draft sentence (old draft for deletions); the
    context is the previous and next sentence joined, one-sided at the
    document boundary.
    """
    if rev.action == ACTION_DELETE:
        index = rev.aligned.old_index
    else:
        index = rev.aligned.new_index
    if index is None:
        raise DomainError("revision has no site index on its relevant side")
    texts = essay.sentence_texts()
    parts = []
    if index - 1 >= 0 and index - 1 < len(texts):
        parts.append(texts[index - 1])
    if index + 1 < len(texts):
        parts.append(texts[index + 1])
    return " ".join(parts)


@dataclass(frozen=True)
class ClassifierBundle:
    content: Classifier
    evidence: Classifier
    success: Classifier


def baseline_bundle(matcher: ArticleMatcher) -> ClassifierBundle:
    return ClassifierBundle(
        content=SurfaceContentBaseline(),
        evidence=EvidenceReasoningBaseline(matcher),
        success=SuccessBaseline(matcher),
    )


def classify_all(
    revisions: list[RevisionPair],
    old_doc: Document,
    new_doc: Document,
    matcher: ArticleMatcher,
    bundle: ClassifierBundle | None = None,
) -> list[RevisionPair]:
    """Run the three stages in order, gating stages 2-3 to content revisions.

    Output preserves input order and shape regardless of which
    classifiers are plugged in; only labels (and provenance notes) vary.
    """
    bundle = bundle or baseline_bundle(matcher)
    success = bundle.success
    if isinstance(success, SuccessBaseline):
        success = success.with_used_keywords(matcher.document_keywords(old_doc))

    out: list[RevisionPair] = []
    for rev in revisions:
        notes: list[str] = list(rev.provenance)
        content_pred = bundle.content.classify(rev)
        if content_pred.note:
            notes.append(f"type_label:{content_pred.note}")
        if content_pred.label != LABEL_CONTENT:
            out.append(rev.with_labels(type_label=content_pred.label, provenance=tuple(notes)))
            continue
        context_doc = old_doc if rev.action == ACTION_DELETE else new_doc
        context = extract_argument_context(context_doc, rev)
        evidence_pred = bundle.evidence.classify(rev, context)
        if evidence_pred.note:
            notes.append(f"er_label:{evidence_pred.note}")
        success_pred = success.classify(rev, context)
        if success_pred.note:
            notes.append(f"success_label:{success_pred.note}")
        out.append(
            rev.with_labels(
                type_label=LABEL_CONTENT,
                er_label=evidence_pred.label,
                success_label=success_pred.label,
                argument_context=context,
                provenance=tuple(notes),
            )
        )
    return out


ClassifierFactory = Callable[..., Classifier]
_REGISTRY: dict[str, ClassifierFactory] = {}


def register_classifier(name: str, factory: ClassifierFactory) -> None:
    _REGISTRY[name] = factory


def create_classifier(name: str, **kwargs) -> Classifier:
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise DomainError(f"no classifier registered under {name!r}") from None
    return factory(**kwargs)


def registered_classifiers() -> list[str]:
    return sorted(_REGISTRY)


register_classifier("content-baseline", lambda matcher=None, **_: SurfaceContentBaseline())
register_classifier(
    "evidence-baseline", lambda matcher, **_: EvidenceReasoningBaseline(matcher)
)
register_classifier("success-baseline", lambda matcher, **_: SuccessBaseline(matcher))
register_classifier(
    "evidence-chat",
    lambda matcher, **kwargs: RemoteChatClassifier(
        "evidence-chat",
        EVIDENCE_LABELS,
        EVIDENCE_CHAT_PROMPT,
        EvidenceReasoningBaseline(matcher),
        **kwargs,
    ),
)
