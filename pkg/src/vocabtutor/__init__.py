"""Vocabulary tutoring engine: word-web content model, phased learner model,
working-set scheduling, event-sourced persistence, pilot simulation, and
per-word A/B analysis.
"""

from .engine import (
    ActivityLedger,
    ActivityType,
    BlendPolicy,
    EngineConfig,
    ExperimentAssignment,
    TutorEngine,
    WorkingSet,
)
from .errors import (
    ConflictingAssignment,
    CorruptLog,
    DanglingMediaReference,
    DuplicateWord,
    EmptyVector,
    InsufficientData,
    InsufficientDistractors,
    InsufficientMedia,
    InvalidWord,
    InvalidWordSets,
    NotParked,
    OddClassCount,
    ScoreOutOfRange,
    StorageError,
    StorageFailure,
    TutorError,
    UnknownClass,
    UnknownItem,
    UnknownLearner,
    UnknownWord,
    WordNotExposed,
    WordWebFormatError,
)
from .learner_model import (
    Dimension,
    LearnerWordState,
    ModelParams,
    Phase,
    PhaseThresholds,
    apply_response,
    ewma,
    promote,
    transition,
)
from .sim import PilotResult, PilotScenario, SimConfig, build_demo_wordweb, build_pilot, run_pilot
from .stats import (
    AnalysisParams,
    AssessmentObservation,
    GroupSample,
    GroupSpec,
    ResponseVector,
    TestResult,
    WordReportRow,
    admit,
    ks_test_one_sided_two_sample,
    per_word_ab_report,
    reduce_vector,
    welch_t_test_one_sided,
)
from .store import Event, EventStore, read_event_log
from .wordweb import (
    AssessmentItem,
    MediaAsset,
    MediaKind,
    Relation,
    RelationKind,
    Tier,
    WordNode,
    WordWeb,
    dump_wordweb,
    load_wordweb,
    parse_wordweb,
)

__version__ = "0.1.0"

__all__ = [
    "ActivityLedger",
    "ActivityType",
    "AnalysisParams",
    "AssessmentItem",
    "AssessmentObservation",
    "BlendPolicy",
    "ConflictingAssignment",
    "CorruptLog",
    "DanglingMediaReference",
    "Dimension",
    "DuplicateWord",
    "EmptyVector",
    "EngineConfig",
    "Event",
    "EventStore",
    "ExperimentAssignment",
    "GroupSample",
    "GroupSpec",
    "InsufficientData",
    "InsufficientDistractors",
    "InsufficientMedia",
    "InvalidWord",
    "InvalidWordSets",
    "LearnerWordState",
    "MediaAsset",
    "MediaKind",
    "ModelParams",
    "NotParked",
    "OddClassCount",
    "Phase",
    "PhaseThresholds",
    "PilotResult",
    "PilotScenario",
    "Relation",
    "RelationKind",
    "ResponseVector",
    "ScoreOutOfRange",
    "SimConfig",
    "StorageError",
    "StorageFailure",
    "TestResult",
    "Tier",
    "TutorEngine",
    "TutorError",
    "UnknownClass",
    "UnknownItem",
    "UnknownLearner",
    "UnknownWord",
    "WordNode",
    "WordNotExposed",
    "WordReportRow",
    "WordWeb",
    "WordWebFormatError",
    "WorkingSet",
    "admit",
    "apply_response",
    "build_demo_wordweb",
    "build_pilot",
    "dump_wordweb",
    "ewma",
    "ks_test_one_sided_two_sample",
    "load_wordweb",
    "parse_wordweb",
    "per_word_ab_report",
    "promote",
    "reduce_vector",
    "run_pilot",
    "transition",
    "welch_t_test_one_sided",
]
