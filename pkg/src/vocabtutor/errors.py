"""Exception taxonomy shared across the tutor modules.

Two families matter to callers: storage faults (corrupt or unwritable event
logs) and everything else (validation / domain errors). The CLI maps the
former to exit code 2 and the latter to exit code 1.
"""

from __future__ import annotations

__all__ = [
    "TutorError",
    "StorageError",
    "StorageFailure",
    "CorruptLog",
    "DuplicateWord",
    "InvalidWord",
    "DanglingMediaReference",
    "UnknownWord",
    "UnknownItem",
    "InsufficientMedia",
    "InsufficientDistractors",
    "WordWebFormatError",
    "ScoreOutOfRange",
    "NotParked",
    "UnknownLearner",
    "UnknownClass",
    "WordNotExposed",
    "ConflictingAssignment",
    "InvalidWordSets",
    "EmptyVector",
    "InsufficientData",
    "OddClassCount",
]


class TutorError(Exception):
    """Base class for all domain errors raised by this package."""


class StorageError(TutorError):
    """Base class for event-log storage faults."""


class StorageFailure(StorageError):
    """The backing log could not be written or read."""


class CorruptLog(StorageError):
    """Replay found a malformed or inconsistent event.

    Carries the sequence number of the offending event when known.
    """

    def __init__(self, message: str, seq: int | None = None):
        super().__init__(message if seq is None else f"event {seq}: {message}")
        self.seq = seq


# --- word web -------------------------------------------------------------

class DuplicateWord(TutorError):
    """A word id is already present in the web."""


class InvalidWord(TutorError):
    """A word record violates a structural constraint (e.g. empty lemma)."""


class DanglingMediaReference(TutorError):
    """A word references a media asset id that does not exist."""


class UnknownWord(TutorError):
    """No word with the given id."""


class UnknownItem(TutorError):
    """No assessment item with the given id."""


class InsufficientMedia(TutorError):
    """The target word has no usable image for item generation."""


class InsufficientDistractors(TutorError):
    """The graph neighbourhood cannot supply two valid distractor words."""


class WordWebFormatError(TutorError):
    """A word-web document failed validation; message carries the record path."""


# --- learner model / engine -------------------------------------------------

class ScoreOutOfRange(TutorError):
    """A response or score fell outside [0, 1]."""


class NotParked(TutorError):
    """Promotion requested for a word that is not in the parked phase."""


class UnknownLearner(TutorError):
    """No learner with the given id is registered."""


class UnknownClass(TutorError):
    """No class with the given id is registered."""


class WordNotExposed(TutorError):
    """Assessment recorded for a parked word outside an experiment context."""


class ConflictingAssignment(TutorError):
    """A learner already belongs to a different experiment group."""


class InvalidWordSets(TutorError):
    """Experiment word sets are inconsistent (learnable must be a subset of assessable)."""


class OddClassCount(TutorError):
    """Pilot construction needs an even number of classes to halve into groups."""


# --- stats -------------------------------------------------------------------

class EmptyVector(TutorError):
    """A response vector with no entries cannot be reduced."""


class InsufficientData(TutorError):
    """Too few admissible learners to analyze; carries the surviving count."""

    def __init__(self, surviving: int, required: int):
        super().__init__(f"{surviving} admissible learners, need {required}")
        self.surviving = surviving
        self.required = required
