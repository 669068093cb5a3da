"""Adaptive detection of commercial-campaign Q&A sessions.

The package extracts three spam-grade features from community Q&A sessions
(questioner history, answerer history, answer-text vocabulary), scores them
with a self-contained logistic-regression classifier, keeps the underlying
count database incrementally updatable from human feedback, and serves the
whole loop over a small HTTP protocol.
"""

from .diagnostics import (
    FeatureDiagnostic,
    NON_SEPARATING_KS,
    diagnostic_report,
    empirical_cdf,
    ks_statistic,
)
from .errors import CqaguardError, DataContractError, InternalInvariantError
from .estimators import CampaignClassifier, SpamGradeExtractor
from .features import (
    DEFAULT_MIN_SUPPORT,
    DEFAULT_NEUTRAL,
    FEATURE_NAMES,
    FeatureVector,
    NotInDatabase,
    build_training_set,
    feature_vector,
    neutral_sg_text,
    sg_ratio,
    sg_text,
    sg_word,
)
from .logistic import (
    EmptyTrainingSet,
    Model,
    SingleClassTrainingSet,
    campaign_score,
    classify,
    cost,
    gradient,
    read_model,
    sigmoid,
    train,
    write_model,
    zero_model,
)
from .metrics import (
    ConfusionMetrics,
    LengthMismatch,
    RocPoint,
    SingleClassInput,
    confusion_metrics,
    roc_curve,
    split_train_test,
)
from .replay import (
    ADAPTIVE,
    FIXED,
    CorpusTooSmall,
    IterationReport,
    ReplayConfig,
    RocExperiment,
    SingleClassSeed,
    read_replay_report,
    replay,
    retrain,
    roc_split_experiment,
    write_replay_report,
)
from .server import CampaignServer, ServerConfig, build_server, load_server_config
from .sessions import (
    CAMPAIGN,
    NORMAL,
    DuplicateUrl,
    MalformedRecord,
    QASession,
    TimeOrderViolation,
    close_order,
    interval_post_time,
    load_corpus,
    session_from_record,
    session_to_record,
    validate_session,
    write_corpus,
)
from .store import (
    ConflictingContent,
    CorruptSnapshot,
    NoNewLabels,
    PublishedState,
    SessionNotFound,
    SessionStore,
    Unauthorized,
    Verdict,
)
from .synth import InvalidConfig, SyntheticConfig, generate_synthetic, standard_config
from .text import (
    UnderflowViolation,
    UserSpamCounts,
    WordStats,
    apply_label,
    build_state,
    distinct_words,
    tokenize,
)

__version__ = "0.1.0"

__all__ = [
    "ADAPTIVE",
    "CAMPAIGN",
    "CampaignClassifier",
    "CampaignServer",
    "ConflictingContent",
    "ConfusionMetrics",
    "CorpusTooSmall",
    "CorruptSnapshot",
    "CqaguardError",
    "DEFAULT_MIN_SUPPORT",
    "DEFAULT_NEUTRAL",
    "DataContractError",
    "DuplicateUrl",
    "EmptyTrainingSet",
    "FEATURE_NAMES",
    "FIXED",
    "FeatureDiagnostic",
    "FeatureVector",
    "InternalInvariantError",
    "InvalidConfig",
    "IterationReport",
    "LengthMismatch",
    "MalformedRecord",
    "Model",
    "NON_SEPARATING_KS",
    "NORMAL",
    "NoNewLabels",
    "NotInDatabase",
    "PublishedState",
    "QASession",
    "ReplayConfig",
    "RocExperiment",
    "RocPoint",
    "ServerConfig",
    "SessionNotFound",
    "SessionStore",
    "SingleClassInput",
    "SingleClassSeed",
    "SingleClassTrainingSet",
    "SpamGradeExtractor",
    "SyntheticConfig",
    "TimeOrderViolation",
    "Unauthorized",
    "UnderflowViolation",
    "UserSpamCounts",
    "Verdict",
    "WordStats",
    "apply_label",
    "build_server",
    "build_state",
    "build_training_set",
    "campaign_score",
    "classify",
    "close_order",
    "confusion_metrics",
    "cost",
    "diagnostic_report",
    "distinct_words",
    "empirical_cdf",
    "feature_vector",
    "generate_synthetic",
    "gradient",
    "interval_post_time",
    "ks_statistic",
    "load_corpus",
    "load_server_config",
    "neutral_sg_text",
    "read_model",
    "read_replay_report",
    "replay",
    "retrain",
    "roc_curve",
    "roc_split_experiment",
    "session_from_record",
    "session_to_record",
    "sg_ratio",
    "sg_text",
    "sg_word",
    "sigmoid",
    "split_train_test",
    "standard_config",
    "train",
    "validate_session",
    "write_corpus",
    "write_model",
    "write_replay_report",
    "zero_model",
]
