"""Pilot simulator: scenario construction, the response model, determinism,
and the experiment-soundness invariants over full runs.
"""

import math

import pytest

from vocabtutor.errors import OddClassCount
from vocabtutor.learner_model import Dimension, Phase
from vocabtutor.sim import (
    GROUP_A,
    GROUP_B,
    SimConfig,
    SimLearnerProfile,
    answer_probability,
    build_pilot,
    run_pilot,
)

SMALL = SimConfig(num_classes=2, learners_per_class=5, num_words=16, duration_days=20)


def profile(baseline, gain):
    return SimLearnerProfile(
        learner_id="l", class_id="c", baseline_knowledge={"w": baseline},
        learning_gain=gain, sessions_per_week=3, assessment_appetite=0.5,
    )


class TestAnswerModel:
    def test_saturated_baseline(self):
        p = profile(1.0, 0.5)
        for exposures in (0, 1, 7):
            assert answer_probability(p, "w", exposures) == 1.0

    def test_guess_floor_without_exposures(self):
        assert answer_probability(profile(0.0, 0.5), "w", 0) == pytest.approx(1 / 3)

    def test_three_exposures(self):
        assert answer_probability(profile(0.0, 0.5), "w", 3) == pytest.approx(0.875)

    def test_unknown_word_defaults_to_zero_baseline(self):
        p = profile(0.0, 0.5)
        assert answer_probability(p, "other", 0) == pytest.approx(1 / 3)

    def test_monotone_in_exposures(self):
        p = profile(0.2, 0.4)
        values = [answer_probability(p, "w", k) for k in range(10)]
        assert values == sorted(values)
        assert all(1 / 3 <= v <= 1.0 for v in values)


class TestBuildPilot:
    def test_default_config_shape(self):
        scenario = build_pilot(SimConfig(), seed=0)
        a = scenario.engine.group(GROUP_A)
        b = scenario.engine.group(GROUP_B)
        assert len(scenario.group_a_classes) == len(scenario.group_b_classes) == 4
        assert len(scenario.set_x) == len(scenario.set_y) == 20
        assert a.learnable_word_ids == frozenset(scenario.set_x)
        assert b.learnable_word_ids == frozenset(scenario.set_y)
        union = frozenset(scenario.set_x) | frozenset(scenario.set_y)
        assert a.assessable_word_ids == b.assessable_word_ids == union
        assert len(a.learner_ids) + len(b.learner_ids) == 8 * 23

    def test_groups_split_along_class_lines(self):
        scenario = build_pilot(SMALL, seed=3)
        a = scenario.engine.group(GROUP_A)
        for lid in a.learner_ids:
            assert scenario.profiles[lid].class_id in scenario.group_a_classes

    def test_tiny_scenario(self):
        cfg = SimConfig(num_classes=2, learners_per_class=2, num_words=4, duration_days=5)
        scenario = build_pilot(cfg, seed=1)
        assert len(scenario.profiles) == 4
        assert len(scenario.web) == 4
        assert len(scenario.set_x) == len(scenario.set_y) == 2

    def test_same_seed_identical_assignments(self):
        s1 = build_pilot(SMALL, seed=42)
        s2 = build_pilot(SMALL, seed=42)
        assert s1.set_x == s2.set_x and s1.set_y == s2.set_y
        assert s1.group_a_classes == s2.group_a_classes
        for lid, p1 in s1.profiles.items():
            p2 = s2.profiles[lid]
            assert (p1.learning_gain, p1.assessment_appetite,
                    p1.sessions_per_week) == (p2.learning_gain, p2.assessment_appetite,
                                              p2.sessions_per_week)
            assert p1.baseline_knowledge == p2.baseline_knowledge

    def test_different_seed_differs(self):
        s1 = build_pilot(SMALL, seed=1)
        s2 = build_pilot(SMALL, seed=2)
        assert s1.set_x != s2.set_x or s1.group_a_classes != s2.group_a_classes

    def test_odd_class_count_rejected(self):
        with pytest.raises(OddClassCount):
            build_pilot(SimConfig(num_classes=3), seed=0)

    def test_profile_draws_inside_configured_ranges(self):
        scenario = build_pilot(SMALL, seed=5)
        cfg = scenario.config
        for p in scenario.profiles.values():
            assert cfg.gain_range[0] <= p.learning_gain <= cfg.gain_range[1]
            assert cfg.appetite_range[0] <= p.assessment_appetite <= cfg.appetite_range[1]
            assert p.sessions_per_week in cfg.sessions_per_week_choices
            for baseline in p.baseline_knowledge.values():
                assert baseline in (cfg.known_baseline, cfg.unknown_baseline)


class TestRunPilot:
    def test_same_seed_bit_identical_logs(self):
        logs = []
        for _ in range(2):
            scenario = build_pilot(SMALL, seed=11)
            run_pilot(scenario)
            logs.append([e.to_json() for e in scenario.engine.store.events()])
        assert logs[0] == logs[1]

    def test_scheduling_order_independence(self):
        def sorted_log(reverse):
            scenario = build_pilot(SMALL, seed=11)
            order = sorted(scenario.profiles, reverse=reverse)
            run_pilot(scenario, learner_order=order)
            return sorted(
                ((e.ts, e.payload.get("learnerId", ""), e.seq, e.kind, e.payload)
                 for e in scenario.engine.store.events()),
                key=lambda r: r[:3],
            )

        a, b = sorted_log(False), sorted_log(True)
        assert [r[3:] for r in a] == [r[3:] for r in b]

    def test_group_gating_holds_over_full_run(self):
        scenario = build_pilot(SMALL, seed=4)
        run_pilot(scenario)
        a = scenario.engine.group(GROUP_A)
        b = scenario.engine.group(GROUP_B)
        for e in scenario.engine.store.events():
            if e.kind != "learningExposure":
                continue
            lid, wid = e.payload["learnerId"], e.payload["wordId"]
            owner = a if lid in a.learner_ids else b
            assert wid in owner.learnable_word_ids

    def test_learned_counts_non_decreasing_modulo_demotions(self):
        scenario = build_pilot(SMALL, seed=4)
        result = run_pilot(scenario)
        demotion_days = {
            (e.payload["learnerId"], int(e.ts))
            for e in scenario.engine.store.events()
            if e.kind == "phaseChange" and e.payload["reason"] == "score"
            and e.payload["fromPhase"] == Phase.LEARNED.value
        }
        for lid in scenario.profiles:
            counts = result.learned_counts(lid)
            for day in range(1, len(counts)):
                if counts[day] < counts[day - 1]:
                    assert (lid, day) in demotion_days, (lid, day)

    def test_daily_snapshot_counts_cover_all_words(self):
        scenario = build_pilot(SMALL, seed=4)
        result = run_pilot(scenario)
        days = {row[0] for row in result.phase_counts}
        assert days == set(range(1, SMALL.duration_days + 1))
        for _, _, by_phase in result.phase_counts:
            assert sum(by_phase.values()) == SMALL.num_words

    def test_snapshot_csv_stream(self, tmp_path):
        path = tmp_path / "snaps.csv"
        scenario = build_pilot(SMALL, seed=4)
        run_pilot(scenario, snapshots_path=path)
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "day,learnerId,wordId,phase,score"
        n_learners = len(scenario.profiles)
        assert len(lines) == 1 + SMALL.duration_days * n_learners * SMALL.num_words
        day, lid, wid, phase, score = lines[1].split(",")
        assert day == "1"
        assert phase in {p.value for p in Phase}
        assert 0.0 <= float(score) <= 1.0

    def test_learning_disabled_run_has_no_exposures(self):
        cfg = SimConfig(num_classes=2, learners_per_class=5, num_words=16,
                        duration_days=20, learning_enabled=False)
        scenario = build_pilot(cfg, seed=4)
        run_pilot(scenario)
        kinds = {e.kind for e in scenario.engine.store.events()}
        assert "learningExposure" not in kinds
        assert "assessmentResponse" in kinds

    def test_zero_gain_accepted_for_null_runs(self):
        cfg = SimConfig(num_classes=2, learners_per_class=5, num_words=16,
                        duration_days=15, gain_range=(0.0, 0.0))
        scenario = build_pilot(cfg, seed=4)
        assert all(p.learning_gain == 0.0 for p in scenario.profiles.values())
        run_pilot(scenario)


class TestFromDict:
    def test_empty_doc_is_defaults(self):
        assert SimConfig.from_dict({}) == SimConfig()

    def test_engine_and_analysis_keys(self):
        cfg = SimConfig.from_dict({
            "alpha": 0.9, "tau1": 0.7, "tau2": 0.8, "tau3": 0.2, "tau4": 0.3,
            "targetSize": 12, "maxRatio": 3.0,
            "tau": 4, "eta": 12, "level": 0.05,
            "numClasses": 4, "durationDays": 30,
            "gainRange": [0.1, 0.2], "learningEnabled": False,
        })
        assert cfg.engine.model.alpha == 0.9
        assert cfg.engine.model.thresholds.tau2 == 0.8
        assert cfg.engine.target_size == 12
        assert cfg.analysis.min_responses == 4
        assert cfg.analysis.min_learners == 12
        assert cfg.analysis.significance_level == 0.05
        assert cfg.num_classes == 4
        assert cfg.duration_days == 30
        assert cfg.gain_range == (0.1, 0.2)
        assert cfg.learning_enabled is False
