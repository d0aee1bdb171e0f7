"""Tutoring engine: working-set management, activity selection, and grading.

The engine owns all live state per (learner, dimension): word scores and
phases, teacher introduction queues, activity counters, and experiment group
assignments. Selections are fully deterministic functions of that state
(ties break on lemma), so identical logs replay to identical engines. Every
mutation is recorded in the event store; replay() rebuilds an engine from a
log and verifies the redundant fields as it goes.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from enum import Enum
from math import floor

from .errors import (
    ConflictingAssignment,
    CorruptLog,
    InvalidWordSets,
    TutorError,
    UnknownClass,
    UnknownLearner,
    UnknownWord,
    WordNotExposed,
)
from .learner_model import (
    Dimension,
    LearnerWordState,
    ModelParams,
    Phase,
    ewma,
    promote,
    transition,
)
from .store import Event, EventStore
from .wordweb import WordWeb

__all__ = [
    "ActivityType",
    "BlendPolicy",
    "ActivityLedger",
    "ExperimentAssignment",
    "WorkingSet",
    "EngineConfig",
    "TutorEngine",
]


class ActivityType(str, Enum):
    LEARNING = "learning"
    ASSESSMENT = "assessment"


@dataclass(frozen=True)
class BlendPolicy:
    """Assessment mix across the three servable pools.

    Fractions are non-negative and sum to 1; seats are apportioned by the
    largest-remainder method so the mix is exact whenever the pools are deep
    enough, with ties resolved in bucket order (assessmentOnly, learning,
    learned).
    """

    fraction_assessment_only: float = 0.5
    fraction_learning: float = 0.3
    fraction_learned: float = 0.2

    def __post_init__(self):
        fs = (self.fraction_assessment_only, self.fraction_learning, self.fraction_learned)
        if any(f < 0.0 for f in fs):
            raise ValueError(f"blend fractions must be non-negative, got {fs}")
        if abs(sum(fs) - 1.0) > 1e-9:
            raise ValueError(f"blend fractions must sum to 1, got {sum(fs)}")

    @property
    def fractions(self) -> tuple[float, float, float]:
        return (self.fraction_assessment_only, self.fraction_learning, self.fraction_learned)


@dataclass
class ActivityLedger:
    """Served-word counters driving the learning/assessment cadence."""

    learning_count: int = 0
    assessment_count: int = 0


@dataclass(frozen=True)
class ExperimentAssignment:
    """One experiment group: who is in it and what they may learn/be asked.

    learnable_word_ids must be a subset of assessable_word_ids: a group can
    be assessed on words it never learns (that is the control data), never
    the other way around.
    """

    group_id: str
    learner_ids: frozenset[str]
    learnable_word_ids: frozenset[str]
    assessable_word_ids: frozenset[str]


@dataclass(frozen=True)
class WorkingSet:
    """The learner's active words: learning phase plus assessment-only phase."""

    learning_words: tuple[str, ...]
    assessment_only_words: tuple[str, ...]

    @property
    def size(self) -> int:
        return len(self.learning_words) + len(self.assessment_only_words)


@dataclass(frozen=True)
class EngineConfig:
    model: ModelParams = field(default_factory=ModelParams)
    blend: BlendPolicy = field(default_factory=BlendPolicy)
    target_size: int = 10        # working-set size refill aims for
    max_ratio: float = 2.0       # forced assessment above this learning:assessment ratio

    def __post_init__(self):
        if self.target_size < 1:
            raise ValueError(f"target_size must be >= 1, got {self.target_size}")
        if self.max_ratio <= 0.0:
            raise ValueError(f"max_ratio must be positive, got {self.max_ratio}")


def _apportion(n: int, fractions: tuple[float, ...]) -> list[int]:
    """Largest-remainder seat counts; ties go to the earlier bucket."""
    quotas = [n * f for f in fractions]
    counts = [int(floor(q)) for q in quotas]
    remaining = n - sum(counts)
    order = sorted(range(len(fractions)), key=lambda i: (-(quotas[i] - counts[i]), i))
    for i in order[:remaining]:
        counts[i] += 1
    return counts


def _is_pristine(state: LearnerWordState) -> bool:
    return (state.phase is Phase.PARKED and state.score == 0.0
            and state.assessment_count == 0 and state.learning_exposures == 0
            and state.last_assessed_seq == 0)


class TutorEngine:
    """Live tutoring state over one word web, persisted through an event store."""

    def __init__(self, web: WordWeb, store: EventStore | None = None,
                 config: EngineConfig | None = None):
        self.web = web
        self.store = store if store is not None else EventStore()
        self.config = config if config is not None else EngineConfig()
        self._learners: dict[str, str | None] = {}          # learner -> class
        self._classes: dict[str, list[str]] = {}
        self._states: dict[tuple[str, Dimension], dict[str, LearnerWordState]] = {}
        self._ledgers: dict[str, ActivityLedger] = {}
        self._groups: dict[str, ExperimentAssignment] = {}
        self._group_of: dict[str, str] = {}
        self._queues: dict[str, list[str]] = {}             # teacher pushes, head first
        self._now: float = 0.0
        self._lock = threading.RLock()

    # --- clock -----------------------------------------------------------------

    @property
    def now(self) -> float:
        return self._now

    def advance_time(self, ts: float) -> None:
        """Move the logical clock forward; events never go back in time."""
        if ts < self._now:
            raise ValueError(f"clock cannot move backwards ({ts} < {self._now})")
        self._now = ts

    # --- registration ------------------------------------------------------------

    def register_learner(self, learner_id: str, class_id: str | None = None) -> None:
        if not learner_id:
            raise UnknownLearner("learner id must be non-empty")
        with self._lock:
            if learner_id in self._learners:
                if self._learners[learner_id] != class_id:
                    raise ConflictingAssignment(
                        f"{learner_id} already registered in class {self._learners[learner_id]!r}")
                return  # idempotent re-registration
            self._learners[learner_id] = class_id
            if class_id is not None:
                self._classes.setdefault(class_id, []).append(learner_id)
            self._ledgers[learner_id] = ActivityLedger()
            self.store.append("learnerRegistration",
                              {"learnerId": learner_id, "classId": class_id},
                              ts=self._now)

    def learner_ids(self) -> list[str]:
        return sorted(self._learners)

    def class_ids(self) -> list[str]:
        return sorted(self._classes)

    def class_of(self, learner_id: str) -> str | None:
        self._require_learner(learner_id)
        return self._learners[learner_id]

    def learners_in_class(self, class_id: str) -> list[str]:
        members = self._classes.get(class_id)
        if members is None:
            raise UnknownClass(f"no class {class_id!r}")
        return sorted(members)

    def ledger(self, learner_id: str) -> ActivityLedger:
        self._require_learner(learner_id)
        return self._ledgers[learner_id]

    def _require_learner(self, learner_id: str) -> None:
        if learner_id not in self._learners:
            raise UnknownLearner(f"no learner {learner_id!r}")

    def _require_word(self, word_id: str) -> None:
        if word_id not in self.web:
            raise UnknownWord(f"no word {word_id!r}")

    # --- state access ---------------------------------------------------------------

    def _state_map(self, learner_id: str, dimension: Dimension) -> dict[str, LearnerWordState]:
        return self._states.setdefault((learner_id, dimension), {})

    def _state(self, learner_id: str, dimension: Dimension, word_id: str) -> LearnerWordState:
        states = self._state_map(learner_id, dimension)
        state = states.get(word_id)
        if state is None:
            state = LearnerWordState(learner_id=learner_id, word_id=word_id,
                                     dimension=dimension)
            states[word_id] = state
        return state

    def _phase_of(self, learner_id: str, dimension: Dimension, word_id: str) -> Phase:
        state = self._state_map(learner_id, dimension).get(word_id)
        return state.phase if state is not None else Phase.PARKED

    def word_state(self, learner_id: str, dimension: Dimension, word_id: str) -> LearnerWordState:
        self._require_learner(learner_id)
        self._require_word(word_id)
        return self._state(learner_id, dimension, word_id)

    def words_in_phase(self, learner_id: str, dimension: Dimension, phase: Phase) -> list[str]:
        """Word ids currently in the phase, in curriculum order."""
        self._require_learner(learner_id)
        states = self._state_map(learner_id, dimension)
        out = []
        for word_id in self.web.word_ids():
            state = states.get(word_id)
            current = state.phase if state is not None else Phase.PARKED
            if current is phase:
                out.append(word_id)
        return out

    def phase_counts(self, learner_id: str, dimension: Dimension) -> dict[Phase, int]:
        """Words per phase; parked covers the untouched remainder of the web."""
        self._require_learner(learner_id)
        counts = {phase: 0 for phase in Phase}
        for state in self._state_map(learner_id, dimension).values():
            counts[state.phase] += 1
        counts[Phase.PARKED] += len(self.web) - sum(counts.values())
        return counts

    def working_set(self, learner_id: str, dimension: Dimension) -> WorkingSet:
        self._require_learner(learner_id)
        learning, assessment_only = [], []
        for word_id, state in self._state_map(learner_id, dimension).items():
            if state.phase is Phase.LEARNING:
                learning.append((state.score, self.web.lemma(word_id), word_id))
            elif state.phase is Phase.ASSESSMENT_ONLY:
                assessment_only.append((state.score, self.web.lemma(word_id), word_id))
        learning.sort()
        assessment_only.sort()
        return WorkingSet(
            learning_words=tuple(w for _, _, w in learning),
            assessment_only_words=tuple(w for _, _, w in assessment_only),
        )

    # --- experiment groups -------------------------------------------------------------

    def assignment_of(self, learner_id: str) -> ExperimentAssignment | None:
        gid = self._group_of.get(learner_id)
        return self._groups[gid] if gid is not None else None

    def group(self, group_id: str) -> ExperimentAssignment:
        if group_id not in self._groups:
            raise ConflictingAssignment(f"no group {group_id!r}")
        return self._groups[group_id]

    def group_ids(self) -> list[str]:
        return sorted(self._groups)

    def assign_words_to_learner_group(self, group_id: str, learner_ids,
                                      learnable_word_ids, assessable_word_ids) -> ExperimentAssignment:
        """Create an experiment group atomically; learners are exclusive to one group."""
        learners = list(learner_ids)
        learnable = frozenset(learnable_word_ids)
        assessable = frozenset(assessable_word_ids)
        with self._lock:
            if not group_id:
                raise InvalidWordSets("group id must be non-empty")
            if group_id in self._groups:
                raise ConflictingAssignment(f"group {group_id!r} already assigned")
            for lid in learners:
                self._require_learner(lid)
                if lid in self._group_of:
                    raise ConflictingAssignment(
                        f"{lid} already belongs to group {self._group_of[lid]!r}; remove first")
            unknown = [w for w in sorted(learnable | assessable) if w not in self.web]
            if unknown:
                raise InvalidWordSets(f"unknown words in group sets: {unknown}")
            if not learnable <= assessable:
                extra = sorted(learnable - assessable)
                raise InvalidWordSets(f"learnable words missing from assessable set: {extra}")
            assignment = ExperimentAssignment(
                group_id=group_id,
                learner_ids=frozenset(learners),
                learnable_word_ids=learnable,
                assessable_word_ids=assessable,
            )
            self._groups[group_id] = assignment
            for lid in learners:
                self._group_of[lid] = group_id
            self.store.append("groupAssignment", {
                "groupId": group_id,
                "learnerIds": sorted(learners),
                "learnableWordIds": sorted(learnable),
                "assessableWordIds": sorted(assessable),
            }, ts=self._now)
            return assignment

    def remove_learner_from_group(self, learner_id: str) -> None:
        """Detach a learner from their group (required before re-assigning)."""
        self._require_learner(learner_id)
        with self._lock:
            gid = self._group_of.get(learner_id)
            if gid is None:
                raise ConflictingAssignment(f"{learner_id} is not in any group")
            old = self._groups[gid]
            self._groups[gid] = ExperimentAssignment(
                group_id=gid,
                learner_ids=old.learner_ids - {learner_id},
                learnable_word_ids=old.learnable_word_ids,
                assessable_word_ids=old.assessable_word_ids,
            )
            del self._group_of[learner_id]
            self.store.append("groupAssignment", {
                "groupId": gid,
                "learnerIds": [],
                "learnableWordIds": sorted(old.learnable_word_ids),
                "assessableWordIds": sorted(old.assessable_word_ids),
                "removedLearnerIds": [learner_id],
            }, ts=self._now)

    # --- teacher introductions ------------------------------------------------------------

    def introduce_words(self, learner_ids, word_ids) -> None:
        """Queue words at the head of the promotion order for these learners.

        Words that are no longer parked when refill reaches them are skipped
        there, so pushing an already-learned word is a harmless no-op.
        """
        learners = list(learner_ids)
        words = list(dict.fromkeys(word_ids))  # dedupe, keep order
        for lid in learners:
            self._require_learner(lid)
        for wid in words:
            self._require_word(wid)
        with self._lock:
            for lid in learners:
                queue = self._queues.setdefault(lid, [])
                keep = [w for w in queue if w not in words]
                self._queues[lid] = words + keep
            self.store.append("wordIntroduction", {
                "learnerIds": learners,
                "wordIds": words,
            }, ts=self._now)

    def introduction_queue(self, learner_id: str) -> list[str]:
        self._require_learner(learner_id)
        return list(self._queues.get(learner_id, ()))

    # --- working-set refill ------------------------------------------------------------

    def _refill_candidates(self, learner_id: str, dimension: Dimension,
                           assignment: ExperimentAssignment | None):
        """Parked, promotion-eligible words in priority order.

        Teacher-pushed words first, then graph expansion seeded by the
        learner's mastered words, then raw curriculum order. Gated words
        (outside an experiment learner's learnable set) are never promoted.
        """
        states = self._state_map(learner_id, dimension)

        def eligible(word_id: str) -> bool:
            if self._phase_of(learner_id, dimension, word_id) is not Phase.PARKED:
                return False
            if assignment is not None and word_id not in assignment.learnable_word_ids:
                return False
            return True

        seen: set[str] = set()
        for word_id in list(self._queues.get(learner_id, ())):
            if word_id not in seen and eligible(word_id):
                seen.add(word_id)
                yield word_id
        seeds = [w for w, s in states.items()
                 if s.phase in (Phase.ASSESSMENT_ONLY, Phase.LEARNED)]
        if seeds:
            for word_id in self.web.related_expansion(seeds, k=len(self.web)):
                if word_id not in seen and eligible(word_id):
                    seen.add(word_id)
                    yield word_id
        for word_id in self.web.word_ids():
            if word_id not in seen and eligible(word_id):
                seen.add(word_id)
                yield word_id

    def refill_working_set(self, learner_id: str, dimension: Dimension) -> list[str]:
        """Promote parked words until the working set reaches the target size.

        Returns the promoted word ids. Never promotes past target_size; a
        short result means the eligible parked pool ran dry.
        """
        self._require_learner(learner_id)
        with self._lock:
            assignment = self.assignment_of(learner_id)
            room = self.config.target_size - self.working_set(learner_id, dimension).size
            promoted: list[str] = []
            if room <= 0:
                return promoted
            for word_id in self._refill_candidates(learner_id, dimension, assignment):
                self._promote_word(learner_id, dimension, word_id)
                promoted.append(word_id)
                room -= 1
                if room == 0:
                    break
            return promoted

    def _promote_word(self, learner_id: str, dimension: Dimension, word_id: str) -> None:
        state = self._state(learner_id, dimension, word_id)
        promote(state, ts=self._now)
        queue = self._queues.get(learner_id)
        if queue and word_id in queue:
            queue.remove(word_id)
        self.store.append("phaseChange", {
            "learnerId": learner_id,
            "wordId": word_id,
            "dimension": dimension.value,
            "fromPhase": Phase.PARKED.value,
            "toPhase": Phase.LEARNING.value,
            "reason": "promotion",
        }, ts=self._now)

    # --- selections ------------------------------------------------------------

    def get_next_learning_words(self, learner_id: str, dimension: Dimension, n: int) -> list[str]:
        """Serve up to n learning-phase words, weakest score first.

        Refills the working set first, counts one learning exposure per word
        served, and respects experiment gating: a gated word is never served
        for learning even if it somehow sits in the learning phase.
        """
        self._require_learner(learner_id)
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        with self._lock:
            self.refill_working_set(learner_id, dimension)
            assignment = self.assignment_of(learner_id)
            pool = []
            for word_id, state in self._state_map(learner_id, dimension).items():
                if state.phase is not Phase.LEARNING:
                    continue
                if assignment is not None and word_id not in assignment.learnable_word_ids:
                    continue
                pool.append((state.score, self.web.lemma(word_id), word_id))
            pool.sort()
            served = [word_id for _, _, word_id in pool[:n]]
            ledger = self._ledgers[learner_id]
            for word_id in served:
                state = self._state(learner_id, dimension, word_id)
                state.learning_exposures += 1
                state.last_updated = self._now
                ledger.learning_count += 1
                self.store.append("learningExposure", {
                    "learnerId": learner_id,
                    "wordId": word_id,
                    "dimension": dimension.value,
                }, ts=self._now)
            return served

    def _control_pool(self, learner_id: str, dimension: Dimension,
                      assignment: ExperimentAssignment) -> list[str]:
        """Gated-but-assessable words currently open for control assessment.

        The pool follows the learner's own progress: one control word (in
        curriculum order) per word the learner has pushed beyond the learning
        phase. This keeps control sampling concentrated on the same
        early-curriculum words that accumulate experimental data, instead of
        thinning every assessment over the whole gated set.
        """
        states = self._state_map(learner_id, dimension)
        mastered = sum(1 for s in states.values()
                       if s.phase in (Phase.ASSESSMENT_ONLY, Phase.LEARNED))
        if mastered == 0:
            return []
        gated = [w for w in self.web.word_ids()
                 if w in assignment.assessable_word_ids
                 and w not in assignment.learnable_word_ids
                 and self._phase_of(learner_id, dimension, w) is Phase.PARKED]
        return gated[:mastered]

    def get_next_assessment_words(self, learner_id: str, dimension: Dimension, n: int) -> list[str]:
        """Serve up to n distinct words to assess, blended across pools.

        Pools: assessment-only (phase assessmentOnly, plus the control pool
        for experiment learners), learning, learned. Within a pool the least
        recently assessed word goes first (never-assessed words lead, ties on
        lemma). Seats follow the blend policy; a pool too shallow for its
        quota hands the spare seats to the other pools in pool order.
        """
        self._require_learner(learner_id)
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        assignment = self.assignment_of(learner_id)
        states = self._state_map(learner_id, dimension)

        def admissible(word_id: str) -> bool:
            return assignment is None or word_id in assignment.assessable_word_ids

        ao_pool, learning_pool, learned_pool = [], [], []
        for word_id, state in states.items():
            if not admissible(word_id):
                continue
            if state.phase is Phase.ASSESSMENT_ONLY:
                ao_pool.append(word_id)
            elif state.phase is Phase.LEARNING:
                learning_pool.append(word_id)
            elif state.phase is Phase.LEARNED:
                learned_pool.append(word_id)
        if assignment is not None:
            ao_pool.extend(self._control_pool(learner_id, dimension, assignment))

        def lru_key(word_id: str):
            state = states.get(word_id)
            last = state.last_assessed_seq if state is not None else 0
            return (last, self.web.lemma(word_id), word_id)

        pools = [sorted(ao_pool, key=lru_key),
                 sorted(learning_pool, key=lru_key),
                 sorted(learned_pool, key=lru_key)]
        counts = _apportion(n, self.config.blend.fractions)
        take = [min(c, len(pool)) for c, pool in zip(counts, pools)]
        shortfall = n - sum(take)
        for i in range(len(pools)):
            if shortfall == 0:
                break
            extra = min(shortfall, len(pools[i]) - take[i])
            take[i] += extra
            shortfall -= extra
        out: list[str] = []
        for pool, t in zip(pools, take):
            out.extend(pool[:t])
        return out

    # --- grading ------------------------------------------------------------

    def update_word_performance(self, learner_id: str, word_id: str,
                                dimension: Dimension, s: float) -> LearnerWordState:
        """Fold a graded response s in [0, 1] into the word's score and phase.

        Parked words may only be assessed under an experiment that lists the
        word as assessable; that is how control-group data arises, and it
        never grants a learning exposure or leaves the parked phase.
        """
        self._require_learner(learner_id)
        self._require_word(word_id)
        with self._lock:
            state = self._state(learner_id, dimension, word_id)
            if state.phase is Phase.PARKED:
                assignment = self.assignment_of(learner_id)
                if assignment is None or word_id not in assignment.assessable_word_ids:
                    raise WordNotExposed(
                        f"{word_id!r} is parked for {learner_id!r} and not under experiment assessment")
            old_phase = state.phase
            state.score = ewma(state.score, s, self.config.model.alpha)
            state.assessment_count += 1
            state.phase = transition(old_phase, state.score, self.config.model.thresholds)
            state.last_updated = self._now
            event = self.store.append("assessmentResponse", {
                "learnerId": learner_id,
                "wordId": word_id,
                "dimension": dimension.value,
                "response": s,
                "score": state.score,
                "phase": state.phase.value,
            }, ts=self._now)
            state.last_assessed_seq = event.seq
            self._ledgers[learner_id].assessment_count += 1
            if state.phase is not old_phase:
                self.store.append("phaseChange", {
                    "learnerId": learner_id,
                    "wordId": word_id,
                    "dimension": dimension.value,
                    "fromPhase": old_phase.value,
                    "toPhase": state.phase.value,
                    "reason": "score",
                }, ts=self._now)
            return state

    # --- cadence ------------------------------------------------------------

    def next_activity_type(self, learner_id: str) -> ActivityType:
        """Assessment is forced once learning outpaces assessment by max_ratio.

        Assessment is always permitted voluntarily; LEARNING here means
        learning is still allowed, not that assessment is barred.
        """
        ledger = self.ledger(learner_id)
        if ledger.learning_count > self.config.max_ratio * max(1, ledger.assessment_count):
            return ActivityType.ASSESSMENT
        return ActivityType.LEARNING

    # --- snapshots and replay ------------------------------------------------------------

    def state_snapshot(self) -> dict:
        """Full live state as a JSON-able document keyed by learner.

        Pristine (never-touched) word states are omitted so the snapshot is
        insensitive to which lookups happened to materialize defaults.
        """
        learners: dict[str, dict] = {}
        for learner_id in sorted(self._learners):
            entry: dict = {
                "classId": self._learners[learner_id],
                "groupId": self._group_of.get(learner_id),
                "queue": list(self._queues.get(learner_id, ())),
                "ledger": {
                    "learningCount": self._ledgers[learner_id].learning_count,
                    "assessmentCount": self._ledgers[learner_id].assessment_count,
                },
                "words": {},
            }
            for dimension in Dimension:
                states = self._states.get((learner_id, dimension))
                if not states:
                    continue
                for word_id in sorted(states):
                    state = states[word_id]
                    if _is_pristine(state):
                        continue
                    entry["words"].setdefault(dimension.value, {})[word_id] = {
                        "score": state.score,
                        "phase": state.phase.value,
                        "assessmentCount": state.assessment_count,
                        "learningExposures": state.learning_exposures,
                        "lastAssessedSeq": state.last_assessed_seq,
                    }
            learners[learner_id] = entry
        groups = {
            gid: {
                "learnerIds": sorted(g.learner_ids),
                "learnableWordIds": sorted(g.learnable_word_ids),
                "assessableWordIds": sorted(g.assessable_word_ids),
            }
            for gid, g in sorted(self._groups.items())
        }
        return {"learners": learners, "groups": groups}

    def _apply_event(self, event: Event) -> None:
        kind, p = event.kind, event.payload
        if kind == "learnerRegistration":
            learner_id = p["learnerId"]
            class_id = p["classId"]
            self._learners[learner_id] = class_id
            if class_id is not None:
                self._classes.setdefault(class_id, []).append(learner_id)
            self._ledgers[learner_id] = ActivityLedger()
        elif kind == "groupAssignment":
            gid = p["groupId"]
            removed = p.get("removedLearnerIds", [])
            if removed:
                old = self._groups[gid]
                self._groups[gid] = ExperimentAssignment(
                    group_id=gid,
                    learner_ids=old.learner_ids - set(removed),
                    learnable_word_ids=old.learnable_word_ids,
                    assessable_word_ids=old.assessable_word_ids,
                )
                for lid in removed:
                    self._group_of.pop(lid, None)
            else:
                if gid in self._groups:
                    raise CorruptLog(f"group {gid!r} assigned twice", seq=event.seq)
                self._groups[gid] = ExperimentAssignment(
                    group_id=gid,
                    learner_ids=frozenset(p["learnerIds"]),
                    learnable_word_ids=frozenset(p["learnableWordIds"]),
                    assessable_word_ids=frozenset(p["assessableWordIds"]),
                )
                for lid in p["learnerIds"]:
                    self._group_of[lid] = gid
        elif kind == "wordIntroduction":
            words = list(dict.fromkeys(p["wordIds"]))
            for lid in p["learnerIds"]:
                queue = self._queues.setdefault(lid, [])
                keep = [w for w in queue if w not in words]
                self._queues[lid] = words + keep
        elif kind == "learningExposure":
            state = self._state(p["learnerId"], Dimension(p["dimension"]), p["wordId"])
            state.learning_exposures += 1
            state.last_updated = event.ts
            self._ledgers[p["learnerId"]].learning_count += 1
        elif kind == "assessmentResponse":
            state = self._state(p["learnerId"], Dimension(p["dimension"]), p["wordId"])
            state.score = ewma(state.score, p["response"], self.config.model.alpha)
            state.assessment_count += 1
            state.phase = transition(state.phase, state.score, self.config.model.thresholds)
            state.last_assessed_seq = event.seq
            state.last_updated = event.ts
            self._ledgers[p["learnerId"]].assessment_count += 1
            if state.score != p["score"]:
                raise CorruptLog(
                    f"recomputed score {state.score!r} != logged {p['score']!r}", seq=event.seq)
            if state.phase.value != p["phase"]:
                raise CorruptLog(
                    f"recomputed phase {state.phase.value} != logged {p['phase']}", seq=event.seq)
        elif kind == "phaseChange":
            state = self._state(p["learnerId"], Dimension(p["dimension"]), p["wordId"])
            if p["reason"] == "promotion":
                promote(state, ts=event.ts)
                queue = self._queues.get(p["learnerId"])
                if queue and p["wordId"] in queue:
                    queue.remove(p["wordId"])
            else:
                # Redundant with the neighbouring response; verify, don't apply.
                if state.phase.value != p["toPhase"]:
                    raise CorruptLog(
                        f"phaseChange says {p['toPhase']} but state is {state.phase.value}",
                        seq=event.seq)
        else:
            raise CorruptLog(f"unknown event kind {kind!r}", seq=event.seq)

    @classmethod
    def replay(cls, events, web: WordWeb, config: EngineConfig | None = None,
               store: EventStore | None = None) -> "TutorEngine":
        """Rebuild an engine from an event sequence, verifying as it goes.

        The replayed engine's own store ends up holding the same events, so
        it can keep running and appending where the original left off.
        """
        engine = cls(web, store=store if store is not None else EventStore(), config=config)
        for event in events:
            try:
                engine._apply_event(event)
            except CorruptLog:
                raise
            except (TutorError, KeyError, ValueError) as err:
                raise CorruptLog(f"cannot apply {event.kind}: {err}", seq=event.seq) from err
            engine.store.append_event(event)
            engine._now = max(engine._now, event.ts)
        return engine
