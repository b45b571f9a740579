"""The submission workflow: persist a draft, score it, pick feedback.

Draft 1 receives evidence-use feedback from its indicators. Later drafts
are aligned against the immediately previous draft, revisions are
extracted and classified, and revision feedback is selected on the
branch of the evidence-use level implied by that previous draft's
indicators (computed and stored when the previous draft was processed).

Submissions for one (student, assignment) are serialized by an exclusive
lock so draft numbering is total even under concurrent requests.
Classifier failures never block a student: remote adapters fall back to
baselines with a provenance note.
"""

from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..alignment import align, extract_revisions
from ..classifiers import ClassifierBundle, create_classifier
from ..embeddings import EmbeddingTable, load_embeddings
from ..errors import DomainError
from ..feedback import Thresholds, select_ef, select_rf
from ..lexicon import ArticleConfig, load_article_config
from ..scoring import ArticleMatcher, score_with_config
from ..serialize import decision_to_dict, revision_to_dict, score_to_dict
from ..textcore import segment
from .store import Store


@dataclass(frozen=True)
class ArticleAssets:
    config: ArticleConfig
    table: EmbeddingTable
    matcher: ArticleMatcher
    thresholds: Thresholds
    bundle: ClassifierBundle


class AssetLoader:
    """Loads and caches per-article lexicons, embeddings, and classifiers."""

    def __init__(
        self,
        lexicon_dir: str | None,
        embeddings_path: str | None,
        classifier_names: dict[str, str],
    ):
        self._lexicon_dir = lexicon_dir
        self._embeddings_path = embeddings_path
        self._classifier_names = classifier_names
        self._cache: dict[str, ArticleAssets] = {}
        self._table: EmbeddingTable | None = None
        self._lock = threading.Lock()

    def _load_table(self) -> EmbeddingTable:
        if self._table is None:
            if self._embeddings_path:
                self._table = load_embeddings(self._embeddings_path)
            else:
                ref = resources.files("revisecoach.data.embeddings") / "sample-50d.txt"
                self._table = load_embeddings(str(ref))
        return self._table

    def _lexicon_path(self, article_id: str) -> str:
        if self._lexicon_dir:
            path = Path(self._lexicon_dir) / f"{article_id}.json"
            if path.exists():
                return str(path)
        ref = resources.files("revisecoach.data.lexicons") / f"{article_id}.json"
        if not Path(str(ref)).exists():
            raise DomainError(f"no lexicon file for article {article_id!r}")
        return str(ref)

    def assets_for(self, article_id: str) -> ArticleAssets:
        with self._lock:
            assets = self._cache.get(article_id)
            if assets is not None:
                return assets
            config = load_article_config(self._lexicon_path(article_id))
            table = self._load_table()
            matcher = ArticleMatcher(config, table)
            bundle = ClassifierBundle(
                content=create_classifier(self._classifier_names["content"], matcher=matcher),
                evidence=create_classifier(self._classifier_names["evidence"], matcher=matcher),
                success=create_classifier(self._classifier_names["success"], matcher=matcher),
            )
            assets = ArticleAssets(
                config=config,
                table=table,
                matcher=matcher,
                thresholds=Thresholds(config.alpha, config.beta, config.gamma),
                bundle=bundle,
            )
            self._cache[article_id] = assets
            return assets


class SubmissionPipeline:
    def __init__(
        self,
        store: Store,
        assets: AssetLoader,
        *,
        synchronous: bool = True,
        worker_threads: int = 2,
    ):
        self._store = store
        self._assets = assets
        self._synchronous = synchronous
        self._executor = None if synchronous else ThreadPoolExecutor(max_workers=worker_threads)
        self._locks: dict[tuple[str, str], threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def _lock_for(self, student_id: str, assignment_id: str) -> threading.Lock:
        key = (student_id, assignment_id)
        with self._locks_guard:
            lock = self._locks.get(key)
            if lock is None:
                lock = threading.Lock()
                self._locks[key] = lock
            return lock

    def submit(self, student: dict, assignment: dict, text: str) -> dict:
        """Validate, persist, and (synchronously or in a worker) process."""
        if not text or not text.strip():
            raise DomainError("Your essay is empty. Please write your draft before submitting.")
        with self._lock_for(student["id"], assignment["id"]):
            existing = self._store.student_submissions(student["id"], assignment["id"])
            if existing:
                last = existing[-1]
                if last["status"] == "processing":
                    raise DomainError(
                        "Your previous draft is still being processed. Please wait a moment."
                    )
                if last["status"] == "failed":
                    # A failed draft never produced feedback; replace it.
                    self._store.delete_submission(last["id"])
                    existing = existing[:-1]
            draft_number = len(existing) + 1
            if draft_number > assignment["max_drafts"]:
                raise DomainError(
                    f"This assignment allows {assignment['max_drafts']} drafts; "
                    "you have submitted them all."
                )
            submission_id = self._store.insert_submission(
                student["id"], assignment["id"], draft_number, text
            )
        if self._executor is None:
            self.process(submission_id)
        else:
            self._executor.submit(self._process_guarded, submission_id)
        record = self._store.get_submission(submission_id)
        assert record is not None
        return record

    def _process_guarded(self, submission_id: int) -> None:
        try:
            self.process(submission_id)
        except Exception as exc:  # worker thread: record, never raise
            self._store.fail_submission(submission_id, str(exc))

    def process(self, submission_id: int) -> None:
        record = self._store.get_submission(submission_id)
        if record is None:
            raise DomainError(f"submission {submission_id} not found")
        try:
            assignment = self._store.get_assignment(record["assignment_id"])
            assets = self._assets.assets_for(assignment["article_id"])
            doc = segment(record["text"])
            score = score_with_config(doc, assets.config, assets.table)
            ef_decision = select_ef(score, assets.thresholds)
            payload: dict = {"score": score_to_dict(score)}

            if record["draft_number"] == 1:
                feedback = ef_decision
                payload["revisions"] = []
            else:
                previous = self._previous_complete(record)
                prev_doc = segment(previous["text"])
                prev_score = score_with_config(prev_doc, assets.config, assets.table)
                revisions = extract_revisions(align(prev_doc, doc))
                from ..classifiers import classify_all

                revisions = classify_all(revisions, prev_doc, doc, assets.matcher, assets.bundle)
                feedback = select_rf(
                    previous["ef_level"],
                    prev_score,
                    score,
                    revisions,
                    assets.matcher,
                    assets.thresholds,
                )
                payload["revisions"] = [revision_to_dict(r) for r in revisions]

            payload["feedback"] = decision_to_dict(feedback)
            if feedback.highlight_topics:
                spans = assets.config.spans_for_topics(list(feedback.highlight_topics))
                payload["highlight_spans"] = [
                    {"topic": s.topic, "start": s.start, "end": s.end} for s in spans
                ]
            else:
                payload["highlight_spans"] = []
            self._store.complete_submission(
                submission_id,
                ef_level=ef_decision.level,
                feedback_kind=feedback.kind,
                feedback_level=feedback.level,
                payload=payload,
            )
        except Exception as exc:
            self._store.fail_submission(submission_id, str(exc))
            raise

    def _previous_complete(self, record: dict) -> dict:
        drafts = self._store.student_submissions(record["student_id"], record["assignment_id"])
        wanted = record["draft_number"] - 1
        for draft in drafts:
            if draft["draft_number"] == wanted:
                if draft["status"] != "complete":
                    raise DomainError(f"draft {wanted} is not complete")
                return draft
        raise DomainError(f"draft {wanted} not found")
