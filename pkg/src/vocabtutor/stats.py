"""Two-group analysis of binary assessment outcomes.

The pipeline reduces each learner's per-word response vector to its mean
correct rate, admits learners with enough responses (tau) and groups with
enough admitted learners (eta), and compares control vs experimental samples
with a one-sided Welch t-test and a one-sided two-sample KS test. The
alternative hypothesis is always "the second (experimental) group performs
better".

Everything here is pure: no engine or storage imports. Callers adapt their
event records into AssessmentObservation values.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from math import exp, inf, sqrt

from .errors import EmptyVector, InsufficientData
from .special import student_t_sf

__all__ = [
    "AnalysisParams",
    "ResponseVector",
    "GroupSample",
    "TestResult",
    "AssessmentObservation",
    "GroupSpec",
    "WordReportRow",
    "reduce_vector",
    "admit",
    "welch_t_test_one_sided",
    "ks_test_one_sided_two_sample",
    "per_word_ab_report",
]

WELCH_T = "welchT"
KS = "ks"


@dataclass(frozen=True)
class AnalysisParams:
    """Admission filters and the decision level.

    min_responses (tau): a learner's vector must have at least this many bits.
    min_learners (eta): a group must keep at least this many admitted learners.
    """

    min_responses: int = 3
    min_learners: int = 10
    significance_level: float = 0.1

    def __post_init__(self):
        if self.min_responses < 1:
            raise ValueError(f"min_responses must be >= 1, got {self.min_responses}")
        if self.min_learners < 2:
            raise ValueError(f"min_learners must be >= 2, got {self.min_learners}")
        if not 0.0 < self.significance_level < 1.0:
            raise ValueError(f"significance_level must lie in (0, 1), got {self.significance_level}")


@dataclass(frozen=True)
class ResponseVector:
    """One learner's chronological binary outcomes on one word."""

    learner_id: str
    word_id: str
    bits: tuple[int, ...]

    def __post_init__(self):
        for b in self.bits:
            if b not in (0, 1):
                raise ValueError(f"response bits must be 0 or 1, got {b!r}")


def reduce_vector(vector: ResponseVector) -> float:
    """Collapse a vector to its mean correct rate, the per-learner statistic."""
    if not vector.bits:
        raise EmptyVector(f"{vector.learner_id}/{vector.word_id} has no responses")
    return sum(vector.bits) / len(vector.bits)


@dataclass(frozen=True)
class GroupSample:
    """Admitted per-learner means for one group."""

    label: str
    means: tuple[float, ...]

    @property
    def n(self) -> int:
        return len(self.means)

    @property
    def mean(self) -> float:
        return sum(self.means) / len(self.means)


def admit(vectors, params: AnalysisParams, *, label: str = "") -> GroupSample:
    """Apply the admission filters: drop short vectors, then require enough learners."""
    kept = [v for v in vectors if len(v.bits) >= params.min_responses]
    if len(kept) < params.min_learners:
        raise InsufficientData(len(kept), params.min_learners)
    return GroupSample(label=label, means=tuple(reduce_vector(v) for v in kept))


@dataclass(frozen=True)
class TestResult:
    test_kind: str
    statistic: float
    p_value: float
    reject_null: bool
    n1: int
    n2: int
    df: float = 0.0  # Welch-Satterthwaite df; 0 for KS and degenerate cases


def _values(group) -> tuple[float, ...]:
    if isinstance(group, GroupSample):
        return group.means
    return tuple(float(x) for x in group)


def _mean(values) -> float:
    return sum(values) / len(values)


def _sample_var(values, mean: float) -> float:
    return sum((x - mean) ** 2 for x in values) / (len(values) - 1)


def welch_t_test_one_sided(g1, g2, *, level: float = 0.1) -> TestResult:
    """Welch's unequal-variance t-test of H1: group-2 mean > group-1 mean.

        t  = (m2 - m1) / sqrt(v1/n1 + v2/n2)
        df = (v1/n1 + v2/n2)^2 / ((v1/n1)^2/(n1-1) + (v2/n2)^2/(n2-1))

    p is the upper t tail at the observed statistic. When both variances are
    zero the statistic degenerates; p is 0.5 on equal means, else 0 or 1 by
    the sign of the difference.
    """
    x1, x2 = _values(g1), _values(g2)
    n1, n2 = len(x1), len(x2)
    if n1 < 2 or n2 < 2:
        raise ValueError(f"need at least 2 values per group, got {n1} and {n2}")
    m1, m2 = _mean(x1), _mean(x2)
    v1, v2 = _sample_var(x1, m1), _sample_var(x2, m2)
    if v1 == 0.0 and v2 == 0.0:
        if m2 == m1:
            stat, p = 0.0, 0.5
        elif m2 > m1:
            stat, p = inf, 0.0
        else:
            stat, p = -inf, 1.0
        return TestResult(WELCH_T, stat, p, p < level, n1, n2, df=0.0)
    se2 = v1 / n1 + v2 / n2
    stat = (m2 - m1) / sqrt(se2)
    df = se2 * se2 / ((v1 / n1) ** 2 / (n1 - 1) + (v2 / n2) ** 2 / (n2 - 1))
    p = student_t_sf(stat, df)
    return TestResult(WELCH_T, stat, p, p < level, n1, n2, df=df)


def ks_test_one_sided_two_sample(g1, g2, *, level: float = 0.1) -> TestResult:
    """One-sided two-sample KS test of H1: group 2 stochastically greater.

    The statistic is D+ = max over pooled points x of F1(x) - F2(x), with F
    the right-continuous empirical CDF. Under H1 the experimental CDF sits
    below the control CDF, pushing D+ up. p uses the one-sided asymptotic
    tail exp(-2 D+^2 n1 n2 / (n1 + n2)), clamped to [0, 1].
    """
    x1, x2 = sorted(_values(g1)), sorted(_values(g2))
    n1, n2 = len(x1), len(x2)
    if n1 < 1 or n2 < 1:
        raise ValueError(f"need at least 1 value per group, got {n1} and {n2}")
    d_plus = 0.0
    for x in sorted(set(x1) | set(x2)):
        diff = bisect_right(x1, x) / n1 - bisect_right(x2, x) / n2
        if diff > d_plus:
            d_plus = diff
    p = exp(-2.0 * d_plus * d_plus * n1 * n2 / (n1 + n2))
    p = min(1.0, max(0.0, p))
    return TestResult(KS, d_plus, p, p < level, n1, n2, df=0.0)


# --- per-word A/B report -----------------------------------------------------

@dataclass(frozen=True)
class AssessmentObservation:
    """One graded response as the analysis sees it."""

    learner_id: str
    word_id: str
    correct: int
    seq: int


@dataclass(frozen=True)
class GroupSpec:
    """The slice of an experiment assignment the analysis needs."""

    group_id: str
    learner_ids: frozenset[str]
    learnable_word_ids: frozenset[str]


@dataclass(frozen=True)
class WordReportRow:
    word_id: str
    experimental_group_id: str = ""
    control_group_id: str = ""
    n_experimental: int = 0
    n_control: int = 0
    experimental_mean: float = 0.0
    control_mean: float = 0.0
    t_result: TestResult | None = None
    ks_result: TestResult | None = None
    skipped_reason: str | None = None

    @property
    def analyzable(self) -> bool:
        return self.skipped_reason is None

    @property
    def effect(self) -> float:
        return self.experimental_mean - self.control_mean


def _vectors_for(observations_by_learner, learner_ids, word_id):
    out = []
    for lid in sorted(learner_ids):
        bits = observations_by_learner.get((lid, word_id))
        if bits:
            out.append(ResponseVector(lid, word_id, tuple(bits)))
    return out


def per_word_ab_report(observations, group_a: GroupSpec, group_b: GroupSpec,
                       params: AnalysisParams) -> list[WordReportRow]:
    """Per-word control-vs-experimental comparison across two groups.

    For each word learnable by exactly one group, that group supplies the
    experimental sample and the other the control sample. Words that fail
    admission on either side are reported as skipped rows, not dropped: a
    word the pilot could not answer is still part of the result. Analyzable
    rows sort by ascending effect (experimental - control), skipped rows
    trail in word order.
    """
    by_learner_word: dict[tuple[str, str], list[int]] = {}
    for obs in sorted(observations, key=lambda o: o.seq):
        if obs.correct not in (0, 1):
            raise ValueError(f"correct must be 0 or 1, got {obs.correct!r}")
        by_learner_word.setdefault((obs.learner_id, obs.word_id), []).append(obs.correct)

    rows: list[WordReportRow] = []
    for word_id in sorted(group_a.learnable_word_ids | group_b.learnable_word_ids):
        in_a = word_id in group_a.learnable_word_ids
        in_b = word_id in group_b.learnable_word_ids
        if in_a and in_b:
            rows.append(WordReportRow(word_id=word_id,
                                      skipped_reason="learnable by both groups"))
            continue
        exp_group, ctrl_group = (group_a, group_b) if in_a else (group_b, group_a)
        ctrl_vecs = _vectors_for(by_learner_word, ctrl_group.learner_ids, word_id)
        exp_vecs = _vectors_for(by_learner_word, exp_group.learner_ids, word_id)
        try:
            ctrl = admit(ctrl_vecs, params, label=ctrl_group.group_id)
        except InsufficientData as err:
            rows.append(WordReportRow(
                word_id=word_id, experimental_group_id=exp_group.group_id,
                control_group_id=ctrl_group.group_id,
                skipped_reason=f"control: {err}"))
            continue
        try:
            expm = admit(exp_vecs, params, label=exp_group.group_id)
        except InsufficientData as err:
            rows.append(WordReportRow(
                word_id=word_id, experimental_group_id=exp_group.group_id,
                control_group_id=ctrl_group.group_id,
                skipped_reason=f"experimental: {err}"))
            continue
        level = params.significance_level
        rows.append(WordReportRow(
            word_id=word_id,
            experimental_group_id=exp_group.group_id,
            control_group_id=ctrl_group.group_id,
            n_experimental=expm.n,
            n_control=ctrl.n,
            experimental_mean=expm.mean,
            control_mean=ctrl.mean,
            t_result=welch_t_test_one_sided(ctrl, expm, level=level),
            ks_result=ks_test_one_sided_two_sample(ctrl, expm, level=level),
        ))
    rows.sort(key=lambda r: ((0, r.effect, r.word_id) if r.analyzable
                             else (1, 0.0, r.word_id)))
    return rows
