"""Evidence-use scoring, revision extraction, and feedback selection for
argumentative writing classrooms.

The library exposes the full pipeline: deterministic text preprocessing,
keyword/embedding evidence indicators, draft-to-draft revision
extraction and classification, and the two expert feedback decision
trees. A batch CLI and a REST service wrap the same functions.
"""

from .alignment import (
    AlignedPair,
    RevisionPair,
    align,
    align_and_extract,
    default_similarity,
    extract_revisions,
)
from .classifiers import (
    ClassifierBundle,
    EvidenceReasoningBaseline,
    Prediction,
    RemoteChatClassifier,
    SuccessBaseline,
    SurfaceContentBaseline,
    baseline_bundle,
    classify_all,
    extract_argument_context,
)
from .embeddings import EmbeddingTable, load_embeddings
from .feedback import (
    FeedbackDecision,
    GuardEval,
    MessageTable,
    Thresholds,
    added_side_sentences,
    default_message_table,
    render,
    replay_trace,
    select_ef,
    select_rf,
)
from .lexicon import ArticleConfig, SpecificityLexicon, TopicLexicon, load_article_config
from .metrics import (
    AgreementReport,
    AnnotationSet,
    ClassifierReport,
    EssaySeries,
    classifier_metrics,
    corpus_stats,
    delta_analysis,
    load_annotations,
    metrics_from_confusion,
    qwk,
)
from .scoring import (
    ArticleMatcher,
    EvidenceScore,
    KeywordMatcher,
    compute_npe,
    compute_spc,
    highlight_topics,
    match_window,
    missing_topics,
    score_draft,
    score_with_config,
)
from .textcore import Document, Sentence, Token, Window, segment, windows

__version__ = "0.1.0"
