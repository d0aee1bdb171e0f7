"""Per-word mastery model: EWMA scoring plus a hysteresis phase machine.

Each (learner, word, dimension) triple carries a score in [0, 1] updated as

    score' = alpha * score + (1 - alpha) * s

for a graded response s in [0, 1], and a phase in {parked, learning,
assessmentOnly, learned}. Promotion and demotion use separate thresholds
(tau3 < tau1, tau4 < tau2) so a word cannot flap on a single response.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .errors import NotParked, ScoreOutOfRange

__all__ = [
    "Dimension",
    "Phase",
    "PhaseThresholds",
    "ModelParams",
    "LearnerWordState",
    "ewma",
    "transition",
    "apply_response",
    "promote",
]

DEFAULT_ALPHA = 0.8   # history weight: one response moves the score by at most 0.2


class Dimension(str, Enum):
    LISTENING = "listening"
    READING = "reading"
    SPEAKING = "speaking"
    WRITING = "writing"


class Phase(str, Enum):
    # Declaration order is the sort order used by status reports.
    PARKED = "parked"
    LEARNING = "learning"
    ASSESSMENT_ONLY = "assessmentOnly"
    LEARNED = "learned"


_PHASE_ORDER = {p: i for i, p in enumerate(Phase)}


def phase_order(phase: Phase) -> int:
    """Stable ordinal for sorting phases in report output."""
    return _PHASE_ORDER[phase]


@dataclass(frozen=True)
class PhaseThresholds:
    """Promotion floors (tau1, tau2) and demotion ceilings (tau3, tau4).

    tau1: learning -> assessmentOnly when score >= tau1
    tau2: assessmentOnly -> learned when score >= tau2
    tau3: assessmentOnly -> learning when score < tau3
    tau4: learned -> assessmentOnly when score < tau4

    tau1 == tau2 is allowed and collapses the assessmentOnly stop on the way
    up; tau1 <= tau2 is required so the up-chain cannot stall mid-way.
    """

    tau1: float = 0.86
    tau2: float = 0.86
    tau3: float = 0.56
    tau4: float = 0.56

    def __post_init__(self):
        for name in ("tau1", "tau2", "tau3", "tau4"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {v}")
        if not self.tau3 < self.tau1:
            raise ValueError("need tau3 < tau1 (demotion ceiling below promotion floor)")
        if not self.tau4 < self.tau2:
            raise ValueError("need tau4 < tau2 (demotion ceiling below promotion floor)")
        if not self.tau1 <= self.tau2:
            raise ValueError("need tau1 <= tau2")


@dataclass(frozen=True)
class ModelParams:
    alpha: float = DEFAULT_ALPHA
    thresholds: PhaseThresholds = field(default_factory=PhaseThresholds)

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")


@dataclass
class LearnerWordState:
    """Mutable per-(learner, word, dimension) tracking record."""

    learner_id: str
    word_id: str
    dimension: Dimension
    score: float = 0.0
    phase: Phase = Phase.PARKED
    assessment_count: int = 0
    learning_exposures: int = 0
    last_updated: float = 0.0
    last_assessed_seq: int = 0  # event seq of the latest response; 0 = never


def ewma(score: float, s: float, alpha: float = DEFAULT_ALPHA) -> float:
    """One scoring step. Convex combination, so [0, 1] is preserved exactly."""
    if not 0.0 <= s <= 1.0:
        raise ScoreOutOfRange(f"response must lie in [0, 1], got {s}")
    return alpha * score + (1.0 - alpha) * s


def _step(phase: Phase, score: float, th: PhaseThresholds) -> Phase:
    if phase is Phase.LEARNING and score >= th.tau1:
        return Phase.ASSESSMENT_ONLY
    if phase is Phase.ASSESSMENT_ONLY:
        if score >= th.tau2:
            return Phase.LEARNED
        if score < th.tau3:
            return Phase.LEARNING
    if phase is Phase.LEARNED and score < th.tau4:
        return Phase.ASSESSMENT_ONLY
    return phase


def transition(phase: Phase, score: float, th: PhaseThresholds) -> Phase:
    """Re-evaluate the phase for a given score, chaining rules to a fixpoint.

    Parked is never left here; only an explicit promote() does that. For a
    fixed score the chain moves in one direction only: the threshold ordering
    makes a promote-then-demote (or the reverse) within one call impossible.
    """
    while True:
        nxt = _step(phase, score, th)
        if nxt is phase:
            return phase
        phase = nxt


def apply_response(state: LearnerWordState, s: float, params: ModelParams,
                   *, seq: int, ts: float) -> tuple[Phase, Phase]:
    """Score a graded response into the state; returns (old phase, new phase).

    Parked words keep their phase (assessments of never-taught words are
    legitimate under an experiment and must not promote).
    """
    state.score = ewma(state.score, s, params.alpha)
    state.assessment_count += 1
    state.last_assessed_seq = seq
    state.last_updated = ts
    old = state.phase
    state.phase = transition(old, state.score, params.thresholds)
    return old, state.phase


def promote(state: LearnerWordState, *, ts: float) -> None:
    """Move a parked word into the learning phase; score carries over."""
    if state.phase is not Phase.PARKED:
        raise NotParked(f"{state.word_id} is {state.phase.value}, not parked")
    state.phase = Phase.LEARNING
    state.last_updated = ts
