"""Synthetic classroom pilot: population builder and day-by-day session loop.

The simulator exercises the whole engine the way a deployment would: classes
split into two experiment groups, words split into two sets, learners run
learning or assessment sessions on their own weekly cadence, and every
response is drawn from a simple exposure-driven answer model

    P(correct) = max(guess, 1 - (1 - baseline) * (1 - gain) ^ exposures)

Runs are bit-identical for a fixed seed, and per-learner randomness comes
from per-learner streams so results do not depend on intra-day scheduling
order.
"""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass, field, replace
from pathlib import Path

from .engine import EngineConfig, TutorEngine, ActivityType
from .errors import OddClassCount
from .learner_model import Dimension, ModelParams, Phase, PhaseThresholds
from .stats import AnalysisParams
from .store import EventStore
from .wordweb import (
    MediaAsset,
    MediaKind,
    Relation,
    RelationKind,
    Tier,
    WordNode,
    WordWeb,
)

__all__ = [
    "SimLearnerProfile",
    "SimConfig",
    "PilotScenario",
    "PilotResult",
    "DEMO_LEMMAS",
    "build_demo_wordweb",
    "build_pilot",
    "answer_probability",
    "run_pilot",
]

GROUP_A = "groupA"
GROUP_B = "groupB"

# Advanced (tier 2/3) vocabulary plausible for a kindergarten curriculum.
DEMO_LEMMAS = (
    "octagon", "sculpture", "veterinarian", "identical", "subtraction",
    "deciduous", "binoculars", "champion", "measure", "career",
    "conflict", "dozen", "half", "hibernate", "insect",
    "pirouette", "prickly", "repair", "tool", "habitat",
    "desert", "nest", "orbit", "recycle", "skeleton",
    "telescope", "volcano", "burrow", "costume", "gallop",
    "harvest", "illustrate", "lantern", "migrate", "nocturnal",
    "orchard", "pattern", "microscope", "compass", "canyon",
)


@dataclass(frozen=True)
class SimLearnerProfile:
    """Ground-truth behaviour of one simulated learner."""

    learner_id: str
    class_id: str
    baseline_knowledge: dict[str, float]
    learning_gain: float
    sessions_per_week: int
    assessment_appetite: float
    guess_probability: float = 1.0 / 3.0  # three-image forced choice


@dataclass(frozen=True)
class SimConfig:
    """Population and engine knobs for one pilot run.

    The defaults mirror the reference deployment shape: 8 classes of ~23
    learners, 40 words, 63 days. Distribution knobs (gain, appetite, baseline
    mix) are simulation choices, not measured quantities.
    """

    num_classes: int = 8
    learners_per_class: int = 23
    num_words: int = 40
    duration_days: int = 63
    words_per_session: int = 5
    dimension: Dimension = Dimension.LISTENING
    engine: EngineConfig = field(default_factory=EngineConfig)
    analysis: AnalysisParams = field(default_factory=AnalysisParams)
    known_fraction: float = 0.3      # chance a word is already known at baseline
    known_baseline: float = 0.9
    unknown_baseline: float = 0.0
    gain_range: tuple[float, float] = (0.50, 0.85)
    appetite_range: tuple[float, float] = (0.45, 0.80)
    sessions_per_week_choices: tuple[int, ...] = (2, 3, 4, 5)
    guess_probability: float = 1.0 / 3.0
    learning_enabled: bool = True    # False: assessment-only runs for null checks

    @staticmethod
    def from_dict(doc: dict) -> "SimConfig":
        """Build a config from the CLI's JSON document (all keys optional)."""
        base = SimConfig()
        thresholds = PhaseThresholds(
            tau1=doc.get("tau1", 0.86), tau2=doc.get("tau2", 0.86),
            tau3=doc.get("tau3", 0.56), tau4=doc.get("tau4", 0.56),
        )
        engine = EngineConfig(
            model=ModelParams(alpha=doc.get("alpha", 0.8), thresholds=thresholds),
            target_size=doc.get("targetSize", 10),
            max_ratio=doc.get("maxRatio", 2.0),
        )
        analysis = AnalysisParams(
            min_responses=doc.get("tau", 3),
            min_learners=doc.get("eta", 10),
            significance_level=doc.get("level", 0.1),
        )
        gain = doc.get("gainRange")
        appetite = doc.get("appetiteRange")
        spw = doc.get("sessionsPerWeek")
        return replace(
            base,
            num_classes=doc.get("numClasses", base.num_classes),
            learners_per_class=doc.get("learnersPerClass", base.learners_per_class),
            num_words=doc.get("numWords", base.num_words),
            duration_days=doc.get("durationDays", base.duration_days),
            words_per_session=doc.get("wordsPerSession", base.words_per_session),
            dimension=Dimension(doc.get("dimension", base.dimension.value)),
            engine=engine,
            analysis=analysis,
            known_fraction=doc.get("knownFraction", base.known_fraction),
            known_baseline=doc.get("knownBaseline", base.known_baseline),
            unknown_baseline=doc.get("unknownBaseline", base.unknown_baseline),
            gain_range=tuple(gain) if gain else base.gain_range,
            appetite_range=tuple(appetite) if appetite else base.appetite_range,
            sessions_per_week_choices=tuple(spw) if spw else base.sessions_per_week_choices,
            guess_probability=doc.get("guessProbability", base.guess_probability),
            learning_enabled=doc.get("learningEnabled", base.learning_enabled),
        )


@dataclass
class PilotScenario:
    config: SimConfig
    seed: int
    web: WordWeb
    engine: TutorEngine
    profiles: dict[str, SimLearnerProfile]
    set_x: tuple[str, ...]
    set_y: tuple[str, ...]
    group_a_classes: tuple[str, ...]
    group_b_classes: tuple[str, ...]


@dataclass
class PilotResult:
    scenario: PilotScenario
    # One row per (day, learner): counts per phase after that day's sessions.
    phase_counts: list[tuple[int, str, dict[Phase, int]]]

    @property
    def engine(self) -> TutorEngine:
        return self.scenario.engine

    def learned_counts(self, learner_id: str) -> list[int]:
        """Learned-phase count per day for one learner, day 1 first."""
        return [counts[Phase.LEARNED] for day, lid, counts in self.phase_counts
                if lid == learner_id]


def build_demo_wordweb(num_words: int, rng: random.Random) -> WordWeb:
    """A connected word web: ring backbone plus seeded chords, full media."""
    web = WordWeb()
    lemmas = list(DEMO_LEMMAS[:num_words])
    for i in range(len(lemmas), num_words):
        lemmas.append(f"word{i + 1:03d}")
    for i, lemma in enumerate(lemmas):
        image_ids = tuple(f"img:{lemma}:{k}" for k in (1, 2, 3))
        video_id = f"vid:{lemma}"
        for aid in image_ids:
            web.add_media(MediaAsset(aid, MediaKind.IMAGE, f"media/{aid}.png",
                                     age_appropriate=True))
        web.add_media(MediaAsset(video_id, MediaKind.VIDEO, f"media/{video_id}.mp4",
                                 age_appropriate=True))
        web.add_word(WordNode(
            word_id=lemma, lemma=lemma,
            tier=Tier.TIER2 if i % 2 == 0 else Tier.TIER3,
            image_ids=image_ids, video_ids=(video_id,),
            sentences=(f"The {lemma} was part of the story.",),
        ))
    n = len(lemmas)
    if n < 2:
        return web
    for i in range(n):
        web.add_relation(Relation(lemmas[i], lemmas[(i + 1) % n],
                                  RelationKind.RELATED,
                                  weight=round(rng.uniform(0.4, 1.0), 2)))
    # Chords keep expansion interesting and give MCQs distance-2+ words.
    for i in range(n):
        j = (i + rng.randrange(3, max(4, n - 2))) % n
        if j == i or j == (i + 1) % n or i == (j + 1) % n:
            continue
        kind = RelationKind.HYPERNYM if i % 9 == 0 else RelationKind.RELATED
        try:
            web.add_relation(Relation(lemmas[i], lemmas[j], kind,
                                      weight=round(rng.uniform(0.2, 0.9), 2)))
        except Exception:
            continue  # duplicate chord; the ring already connects everything
    return web


def build_pilot(config: SimConfig, seed: int) -> PilotScenario:
    """Assemble the population, word sets, group assignments, and engine."""
    if config.num_classes % 2 != 0:
        raise OddClassCount(f"need an even class count, got {config.num_classes}")
    rng = random.Random(f"pilot:{seed}")
    web = build_demo_wordweb(config.num_words, rng)
    store = EventStore()
    engine = TutorEngine(web, store=store, config=config.engine)

    class_ids = [f"class{c + 1:02d}" for c in range(config.num_classes)]
    profiles: dict[str, SimLearnerProfile] = {}
    word_ids = web.word_ids()
    for class_id in class_ids:
        for s in range(config.learners_per_class):
            learner_id = f"{class_id}-s{s + 1:02d}"
            engine.register_learner(learner_id, class_id)
            baseline = {
                w: (config.known_baseline if rng.random() < config.known_fraction
                    else config.unknown_baseline)
                for w in word_ids
            }
            profiles[learner_id] = SimLearnerProfile(
                learner_id=learner_id,
                class_id=class_id,
                baseline_knowledge=baseline,
                learning_gain=rng.uniform(*config.gain_range),
                sessions_per_week=rng.choice(config.sessions_per_week_choices),
                assessment_appetite=rng.uniform(*config.appetite_range),
                guess_probability=config.guess_probability,
            )

    shuffled_classes = class_ids.copy()
    rng.shuffle(shuffled_classes)
    half = config.num_classes // 2
    group_a_classes = tuple(sorted(shuffled_classes[:half]))
    group_b_classes = tuple(sorted(shuffled_classes[half:]))

    shuffled_words = word_ids.copy()
    rng.shuffle(shuffled_words)
    set_x = tuple(sorted(shuffled_words[:len(shuffled_words) // 2]))
    set_y = tuple(sorted(shuffled_words[len(shuffled_words) // 2:]))
    all_words = frozenset(word_ids)

    a_learners = [lid for lid, p in profiles.items() if p.class_id in group_a_classes]
    b_learners = [lid for lid, p in profiles.items() if p.class_id in group_b_classes]
    engine.assign_words_to_learner_group(GROUP_A, sorted(a_learners), set_x, all_words)
    engine.assign_words_to_learner_group(GROUP_B, sorted(b_learners), set_y, all_words)

    return PilotScenario(
        config=config, seed=seed, web=web, engine=engine, profiles=profiles,
        set_x=set_x, set_y=set_y,
        group_a_classes=group_a_classes, group_b_classes=group_b_classes,
    )


def answer_probability(profile: SimLearnerProfile, word_id: str, exposures: int) -> float:
    """Chance of a correct answer after the given number of learning exposures."""
    baseline = profile.baseline_knowledge.get(word_id, 0.0)
    learned = 1.0 - (1.0 - baseline) * (1.0 - profile.learning_gain) ** exposures
    return max(profile.guess_probability, learned)


def _run_session(engine: TutorEngine, profile: SimLearnerProfile,
                 stream: random.Random, config: SimConfig) -> None:
    learner_id = profile.learner_id
    dim = config.dimension
    n = config.words_per_session
    # Sessions top up the working set first so assessment-only policies
    # (null-effect runs) still have words to ask about.
    engine.refill_working_set(learner_id, dim)
    forced = engine.next_activity_type(learner_id) is ActivityType.ASSESSMENT
    wants_assessment = stream.random() < profile.assessment_appetite
    assessing = forced or wants_assessment or not config.learning_enabled
    if not assessing:
        served = engine.get_next_learning_words(learner_id, dim, n)
        if served:
            return
        assessing = True  # nothing learnable right now; fall back to assessing
    words = engine.get_next_assessment_words(learner_id, dim, n)
    for word_id in words:
        exposures = engine.word_state(learner_id, dim, word_id).learning_exposures
        p = answer_probability(profile, word_id, exposures)
        s = 1.0 if stream.random() < p else 0.0
        engine.update_word_performance(learner_id, word_id, dim, s)


def run_pilot(scenario: PilotScenario, *, snapshots_path: str | Path | None = None,
              learner_order=None) -> PilotResult:
    """Run the full pilot day loop.

    learner_order, when given, permutes intra-day scheduling; per-learner
    random streams make the outcome identical either way (asserted in tests).
    Snapshots, when requested, stream one CSV row per (day, learner, word).
    """
    config = scenario.config
    engine = scenario.engine
    dim = config.dimension
    learners = list(learner_order) if learner_order is not None else sorted(scenario.profiles)
    streams = {lid: random.Random(f"run:{scenario.seed}:{lid}") for lid in learners}
    phase_rows: list[tuple[int, str, dict[Phase, int]]] = []

    writer = None
    fh = None
    if snapshots_path is not None:
        fh = open(snapshots_path, "w", newline="", encoding="utf-8")
        writer = csv.writer(fh)
        writer.writerow(["day", "learnerId", "wordId", "phase", "score"])
    try:
        for day in range(1, config.duration_days + 1):
            engine.advance_time(float(day))
            for learner_id in learners:
                profile = scenario.profiles[learner_id]
                stream = streams[learner_id]
                active = stream.random() < profile.sessions_per_week / 7.0
                if active:
                    _run_session(engine, profile, stream, config)
            for learner_id in sorted(scenario.profiles):
                counts = engine.phase_counts(learner_id, dim)
                phase_rows.append((day, learner_id, counts))
                if writer is not None:
                    for word_id in scenario.web.word_ids():
                        state = engine.word_state(learner_id, dim, word_id)
                        writer.writerow([day, learner_id, word_id,
                                         state.phase.value, repr(state.score)])
    finally:
        if fh is not None:
            fh.close()
    return PilotResult(scenario=scenario, phase_counts=phase_rows)
