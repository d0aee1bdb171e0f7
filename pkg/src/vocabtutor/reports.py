"""Teacher-facing status reports and event-log analysis adapters.

Learner reports read live engine state; class reports combine state with the
event log so the intervention ranking reflects actually-observed correct
rates rather than model scores. The adapters at the bottom turn a raw event
sequence into the pure inputs the stats module wants.
"""

from __future__ import annotations

from dataclasses import dataclass

from .engine import TutorEngine
from .errors import InvalidWordSets
from .learner_model import Dimension, Phase, phase_order
from .stats import (
    AnalysisParams,
    AssessmentObservation,
    GroupSpec,
    WordReportRow,
    per_word_ab_report,
)

__all__ = [
    "LearnerWordStatus",
    "ClassWordStatus",
    "word_status_for_learner",
    "word_status_for_class",
    "observations_from_events",
    "group_specs_from_events",
    "analyze_log",
]


@dataclass(frozen=True)
class LearnerWordStatus:
    word_id: str
    lemma: str
    phase: Phase
    score: float
    assessment_count: int
    learning_exposures: int


@dataclass(frozen=True)
class ClassWordStatus:
    word_id: str
    lemma: str
    mean_score: float
    phase_histogram: dict[str, int]
    response_count: int
    mean_correct_rate: float | None  # None when the class has no responses yet
    priority_rank: int


def word_status_for_learner(engine: TutorEngine, learner_id: str,
                            dimension: Dimension) -> list[LearnerWordStatus]:
    """Every word's standing for one learner, strongest phases last.

    Sorted by phase (parked, learning, assessmentOnly, learned), then by
    descending score, then lemma, so a teacher scans struggling words first
    within each block.
    """
    rows = []
    for word_id in engine.web.word_ids():
        state = engine.word_state(learner_id, dimension, word_id)
        rows.append(LearnerWordStatus(
            word_id=word_id,
            lemma=engine.web.lemma(word_id),
            phase=state.phase,
            score=state.score,
            assessment_count=state.assessment_count,
            learning_exposures=state.learning_exposures,
        ))
    rows.sort(key=lambda r: (phase_order(r.phase), -r.score, r.lemma, r.word_id))
    return rows


def word_status_for_class(engine: TutorEngine, class_id: str,
                          dimension: Dimension) -> list[ClassWordStatus]:
    """Class-level rollup with an intervention ranking.

    Rank 1 is the word the class answers worst (lowest mean correct rate in
    the event log, ties on lemma); words nobody has answered yet rank after
    all observed words. Rows come back in rank order.
    """
    members = engine.learners_in_class(class_id)
    member_set = set(members)
    correct: dict[str, int] = {}
    total: dict[str, int] = {}
    for event in engine.store:
        if event.kind != "assessmentResponse":
            continue
        if event.payload["learnerId"] not in member_set:
            continue
        word_id = event.payload["wordId"]
        total[word_id] = total.get(word_id, 0) + 1
        if event.payload["response"] >= 0.5:
            correct[word_id] = correct.get(word_id, 0) + 1

    prelim = []
    for word_id in engine.web.word_ids():
        lemma = engine.web.lemma(word_id)
        histogram = {phase.value: 0 for phase in Phase}
        score_sum = 0.0
        for learner_id in members:
            state = engine.word_state(learner_id, dimension, word_id)
            histogram[state.phase.value] += 1
            score_sum += state.score
        n = total.get(word_id, 0)
        rate = correct.get(word_id, 0) / n if n else None
        prelim.append((word_id, lemma, score_sum / len(members), histogram, n, rate))

    prelim.sort(key=lambda row: ((0, row[5], row[1]) if row[5] is not None
                                 else (1, 0.0, row[1])))
    return [
        ClassWordStatus(word_id=w, lemma=lem, mean_score=ms, phase_histogram=h,
                        response_count=n, mean_correct_rate=rate, priority_rank=i + 1)
        for i, (w, lem, ms, h, n, rate) in enumerate(prelim)
    ]


# --- event-log adapters ------------------------------------------------------

def observations_from_events(events) -> list[AssessmentObservation]:
    """Binary observations from assessment events; graded s >= 0.5 counts correct."""
    out = []
    for event in events:
        if event.kind != "assessmentResponse":
            continue
        p = event.payload
        out.append(AssessmentObservation(
            learner_id=p["learnerId"],
            word_id=p["wordId"],
            correct=1 if p["response"] >= 0.5 else 0,
            seq=event.seq,
        ))
    return out


def group_specs_from_events(events) -> list[GroupSpec]:
    """Reconstruct experiment groups from assignment events, honoring removals."""
    members: dict[str, set[str]] = {}
    learnable: dict[str, frozenset[str]] = {}
    for event in events:
        if event.kind != "groupAssignment":
            continue
        p = event.payload
        gid = p["groupId"]
        removed = p.get("removedLearnerIds", [])
        if removed:
            members[gid] -= set(removed)
        else:
            members[gid] = set(p["learnerIds"])
            learnable[gid] = frozenset(p["learnableWordIds"])
    return [GroupSpec(group_id=gid, learner_ids=frozenset(members[gid]),
                      learnable_word_ids=learnable[gid])
            for gid in sorted(members)]


def analyze_log(events, params: AnalysisParams) -> list[WordReportRow]:
    """Full A/B report for a two-group event log."""
    groups = group_specs_from_events(events)
    if len(groups) != 2:
        raise InvalidWordSets(f"analysis needs exactly 2 experiment groups, found {len(groups)}")
    observations = observations_from_events(events)
    return per_word_ab_report(observations, groups[0], groups[1], params)
