"""Teacher reports and the event-log to analysis adapters."""

import pytest

from vocabtutor.engine import EngineConfig, TutorEngine
from vocabtutor.errors import InvalidWordSets, UnknownLearner
from vocabtutor.learner_model import Dimension, ModelParams, Phase, PhaseThresholds
from vocabtutor.reports import (
    analyze_log,
    group_specs_from_events,
    observations_from_events,
    word_status_for_class,
    word_status_for_learner,
)
from vocabtutor.sim import SimConfig, build_pilot, run_pilot
from vocabtutor.stats import AnalysisParams
from vocabtutor.wordweb import WordNode, WordWeb

DIM = Dimension.LISTENING
SPLIT = EngineConfig(model=ModelParams(
    thresholds=PhaseThresholds(tau1=0.5, tau2=0.9, tau3=0.3, tau4=0.6)))


def small_engine(n_words=6, n_learners=3, config=None):
    web = WordWeb()
    lemmas = ["apple", "berry", "cherry", "damson", "elder", "fig",
              "grape", "honeydew"][:n_words]
    for i, lemma in enumerate(lemmas):
        web.add_word(WordNode(f"w{i}", lemma))
    engine = TutorEngine(web, config=config)
    for i in range(n_learners):
        engine.register_learner(f"s{i}", class_id="c1")
    return engine


class TestLearnerReport:
    def test_fresh_learner_all_parked_score_zero(self):
        engine = small_engine()
        rows = word_status_for_learner(engine, "s0", DIM)
        assert len(rows) == 6
        assert all(r.phase is Phase.PARKED and r.score == 0.0 for r in rows)
        assert [r.lemma for r in rows] == sorted(r.lemma for r in rows)

    def test_unknown_learner(self):
        engine = small_engine()
        with pytest.raises(UnknownLearner):
            word_status_for_learner(engine, "ghost", DIM)

    def test_phases_grouped_in_progression_order(self):
        engine = small_engine(config=SPLIT)
        engine.refill_working_set("s0", DIM)
        for _ in range(30):
            engine.update_word_performance("s0", "w0", DIM, 1.0)  # learned
        for _ in range(3):
            engine.update_word_performance("s0", "w1", DIM, 1.0)  # assessmentOnly
        rows = word_status_for_learner(engine, "s0", DIM)
        phases = [r.phase for r in rows]
        order = [Phase.PARKED, Phase.LEARNING, Phase.ASSESSMENT_ONLY, Phase.LEARNED]
        assert phases == sorted(phases, key=order.index)
        assert rows[-1].word_id == "w0"

    def test_matches_engine_state_exactly(self):
        scenario = build_pilot(
            SimConfig(num_classes=2, learners_per_class=3, num_words=10, duration_days=15),
            seed=2)
        run_pilot(scenario)
        engine = scenario.engine
        lid = sorted(scenario.profiles)[0]
        for row in word_status_for_learner(engine, lid, DIM):
            state = engine.word_state(lid, DIM, row.word_id)
            assert row.phase is state.phase
            assert row.score == state.score
            assert row.assessment_count == state.assessment_count


class TestClassReport:
    def test_mastered_word_ranks_last(self):
        engine = small_engine()
        engine.refill_working_set("s0", DIM)
        engine.refill_working_set("s1", DIM)
        for _ in range(4):
            engine.update_word_performance("s0", "w2", DIM, 1.0)
            engine.update_word_performance("s1", "w2", DIM, 1.0)
        engine.update_word_performance("s0", "w1", DIM, 0.0)
        rows = word_status_for_class(engine, "c1", DIM)
        observed = [r for r in rows if r.response_count]
        assert observed[-1].word_id == "w2"
        assert observed[-1].mean_correct_rate == 1.0
        assert rows[0].word_id == "w1"
        assert rows[0].priority_rank == 1

    def test_no_data_words_tie_broken_by_lemma(self):
        engine = small_engine()
        rows = word_status_for_class(engine, "c1", DIM)
        assert all(r.mean_correct_rate is None for r in rows)
        assert [r.lemma for r in rows] == sorted(r.lemma for r in rows)
        assert [r.priority_rank for r in rows] == list(range(1, 7))

    def test_histogram_sums_to_class_size(self):
        engine = small_engine()
        engine.refill_working_set("s0", DIM)
        for row in word_status_for_class(engine, "c1", DIM):
            assert sum(row.phase_histogram.values()) == 3

    def test_ranks_equal_brute_force_event_means(self):
        scenario = build_pilot(
            SimConfig(num_classes=2, learners_per_class=4, num_words=12, duration_days=20),
            seed=6)
        run_pilot(scenario)
        engine = scenario.engine
        class_id = sorted({p.class_id for p in scenario.profiles.values()})[0]
        members = set(engine.learners_in_class(class_id))
        totals, hits = {}, {}
        for e in engine.store:
            if e.kind == "assessmentResponse" and e.payload["learnerId"] in members:
                w = e.payload["wordId"]
                totals[w] = totals.get(w, 0) + 1
                hits[w] = hits.get(w, 0) + (1 if e.payload["response"] >= 0.5 else 0)
        rows = word_status_for_class(engine, class_id, DIM)
        for row in rows:
            if row.word_id in totals:
                assert row.response_count == totals[row.word_id]
                assert row.mean_correct_rate == pytest.approx(
                    hits[row.word_id] / totals[row.word_id])
        observed = [r for r in rows if r.response_count]
        rates = [r.mean_correct_rate for r in observed]
        assert rates == sorted(rates)


class TestAdapters:
    def test_observations_binarize_at_half(self):
        engine = small_engine()
        engine.refill_working_set("s0", DIM)
        engine.update_word_performance("s0", "w0", DIM, 0.4)
        engine.update_word_performance("s0", "w0", DIM, 0.5)
        engine.update_word_performance("s0", "w0", DIM, 1.0)
        obs = observations_from_events(engine.store.events())
        assert [o.correct for o in obs] == [0, 1, 1]
        assert [o.word_id for o in obs] == ["w0"] * 3

    def test_group_specs_honor_removals(self):
        engine = small_engine()
        engine.assign_words_to_learner_group("g1", ["s0", "s1"], ["w0"], ["w0", "w1"])
        engine.assign_words_to_learner_group("g2", ["s2"], ["w1"], ["w0", "w1"])
        engine.remove_learner_from_group("s1")
        specs = group_specs_from_events(engine.store.events())
        by_id = {s.group_id: s for s in specs}
        assert by_id["g1"].learner_ids == frozenset({"s0"})
        assert by_id["g2"].learner_ids == frozenset({"s2"})

    def test_analyze_log_needs_two_groups(self):
        engine = small_engine()
        engine.assign_words_to_learner_group("g1", ["s0"], ["w0"], ["w0"])
        with pytest.raises(InvalidWordSets):
            analyze_log(engine.store.events(), AnalysisParams())

    def test_analyze_log_on_pilot(self):
        scenario = build_pilot(SimConfig(num_classes=2, learners_per_class=12,
                                         num_words=12, duration_days=30), seed=0)
        run_pilot(scenario)
        rows = analyze_log(scenario.engine.store.events(), AnalysisParams())
        assert len(rows) == 12
        analyzable = [r for r in rows if r.analyzable]
        skipped = [r for r in rows if not r.analyzable]
        assert all(r.skipped_reason for r in skipped)
        effects = [r.effect for r in analyzable]
        assert effects == sorted(effects)
