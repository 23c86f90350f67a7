"""One student's pass through the tutor, plus condition assignment and transition extraction."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from ..bkt import BktState, ThresholdTable, bkt_condition_select
from ..drl.ddqn import TrainedPolicy, Transition, compute_reward, select_action
from ..drl.features import Normalizer, extract_state, raw_features
from ..logic.proof import Problem
from ..records import AttemptRecord, SessionLog
from ..scoring import PROBLEM_TYPES, TimeBounds, composite_score, test_score_average
from .curriculum import Curriculum, Item
from .student import PopulationConfig, SimStudentParams, make_variant, sample_student, simulate_attempt

CONDITIONS = ("Control", "BKT", "DRL")
PHASES = ("history", "drl-corpus", "trial")
VARIANT_POOL = 8


class TooFewStudents(ValueError):
    pass


class MissingPolicy(ValueError):
    pass


@dataclass(frozen=True)
class Policies:
    thresholds: Optional[ThresholdTable] = None
    model: Optional[TrainedPolicy] = None


@dataclass
class StudentStreams:
    """Independent generators for one student, derived from (master seed, phase, index)."""

    params: np.random.Generator
    decisions: np.random.Generator
    outcomes: np.random.Generator

    @classmethod
    def derive(cls, master_seed: int, phase: str, index: int) -> "StudentStreams":
        ss = np.random.SeedSequence([master_seed, PHASES.index(phase), index])
        a, b, c = ss.spawn(3)
        return cls(np.random.default_rng(a), np.random.default_rng(b), np.random.default_rng(c))


class VariantPool:
    """A fixed set of seeded Guided/Buggy variants per problem, generated on first use."""

    def __init__(self, pop: PopulationConfig, size: int = VARIANT_POOL):
        self.pop = pop
        self.size = size
        self._cache: dict[tuple[str, str], list] = {}

    def draw(self, problem: Problem, kind: str, rng: np.random.Generator):
        if kind not in ("Guided", "Buggy"):
            return None
        key = (problem.id, kind)
        if key not in self._cache:
            self._cache[key] = [make_variant(problem, kind, self.pop, seed) for seed in range(self.size)]
        return self._cache[key][int(rng.integers(self.size))]


def ps_override(previous: Sequence[str], slot: int, choice: str) -> tuple[str, bool]:
    """Force PS in the third slot when the first two were both worked examples."""
    if slot == 3 and len(previous) >= 2 and all(t != "PS" for t in previous[:2]) and choice != "PS":
        return "PS", True
    return choice, False


@dataclass
class SessionState:
    """Everything a session carries between problems."""

    student: SimStudentParams
    streams: StudentStreams
    mastery: dict[str, float]
    bkt: BktState = field(default_factory=BktState)
    log: Optional[SessionLog] = None
    cursor: int = 0


def _score(item: Item, rec: AttemptRecord, bounds: Optional[Mapping[str, TimeBounds]]):
    if bounds is None or item.section == "intro":
        return None
    return composite_score(rec.attempt, rec.reference_steps, bounds[item.problem.id])


def _play(state: SessionState, item: Item, kind: str, pop: PopulationConfig, pool: VariantPool,
          bounds, choice=None, overridden=False, rationale=None) -> AttemptRecord:
    rng = state.streams.outcomes
    variant = pool.draw(item.problem, kind, rng)
    gain_scale = {"intro": 1.0, "pretest": pop.test_gain_factor, "training": 1.0,
                  "level_end": pop.test_gain_factor, "posttest": 0.0}[item.section]
    out = simulate_attempt(state.student, state.mastery, item.problem, kind, rng, pop, variant, gain_scale)
    state.mastery = out.mastery
    for rule, ok in out.observations:
        state.bkt.observe(rule, ok)
    rec = AttemptRecord(
        out.attempt,
        item.section,
        item.problem.reference_steps,
        choice,
        overridden,
        rationale or {},
        out.hint_offsets,
        state.bkt.snapshot(),
    )
    rec.score = _score(item, rec, bounds)
    state.log.attempts.append(rec)
    return rec


def start_session(
    student_id: str,
    streams: StudentStreams,
    curriculum: Curriculum,
    pop: PopulationConfig,
    pool: VariantPool,
    bounds: Optional[Mapping[str, TimeBounds]] = None,
) -> SessionState:
    """Sample the learner and play the introduction and pretest, which no condition affects."""
    student = sample_student(student_id, pop, streams.params)
    state = SessionState(student, streams, dict(student.mastery), log=SessionLog(student_id, ""))
    for item in curriculum:
        if item.section not in ("intro", "pretest"):
            break
        _play(state, item, "WE" if item.section == "intro" else "PS", pop, pool, bounds)
        state.cursor += 1
    return state


def _choose(condition: str, state: SessionState, item: Item, policies: Policies) -> tuple[str, dict]:
    rng = state.streams.decisions
    if condition == "Control":
        choice = PROBLEM_TYPES[int(rng.integers(3))]
        return choice, {"policy": "random"}
    if condition == "BKT":
        if policies.thresholds is None:
            raise MissingPolicy("BKT condition needs a threshold table")
        last = state.log.attempts[-1]
        position = (last.level, last.slot)
        choice, why = bkt_condition_select(state.bkt, policies.thresholds, position, item.problem.required_rules, rng)
        return choice, {"policy": "bkt", **why}
    if condition == "DRL":
        if policies.model is None:
            raise MissingPolicy("DRL condition needs a trained model")
        s = extract_state(state.log.attempts, item.level, item.slot, policies.model.normalizer)
        q = policies.model.q_values(s)
        return select_action(policies.model, s), {"policy": "drl", "q": [float(v) for v in q]}
    raise ValueError(f"unknown condition {condition!r}")


def assign_problem_type(
    condition: str, state: SessionState, item: Item, policies: Policies, served_in_level: Sequence[str]
) -> tuple[str, str, bool, dict]:
    """(served type, raw policy choice, overridden?, rationale) for one training slot."""
    choice, why = _choose(condition, state, item, policies)
    kind, overridden = ps_override(served_in_level, item.slot, choice)
    return kind, choice, overridden, why


def finish_session(
    state: SessionState,
    condition: str,
    curriculum: Curriculum,
    policies: Policies,
    pop: PopulationConfig,
    pool: VariantPool,
    bounds: Optional[Mapping[str, TimeBounds]] = None,
) -> SessionLog:
    """Play the training levels and the posttest under ``condition``."""
    if condition not in CONDITIONS:
        raise ValueError(f"unknown condition {condition!r}")
    state.log.condition = condition
    served: dict[int, list[str]] = {}
    for item in curriculum.items[state.cursor:]:
        if item.section == "training":
            prev = served.setdefault(item.level, [])
            kind, choice, overridden, why = assign_problem_type(condition, state, item, policies, prev)
            prev.append(kind)
            _play(state, item, kind, pop, pool, bounds, choice, overridden, why)
        else:
            _play(state, item, "PS", pop, pool, bounds)
        state.cursor += 1
    return state.log


def run_session(
    student_id: str,
    streams: StudentStreams,
    condition: str,
    curriculum: Curriculum,
    policies: Policies,
    pop: PopulationConfig,
    pool: VariantPool,
    bounds: Optional[Mapping[str, TimeBounds]] = None,
) -> SessionLog:
    state = start_session(student_id, streams, curriculum, pop, pool, bounds)
    return finish_session(state, condition, curriculum, policies, pop, pool, bounds)


def stratified_assign(
    pretest: Mapping[str, float], rng: np.random.Generator, conditions: Sequence[str] = CONDITIONS
) -> dict[str, str]:
    """Sort by pretest, cut into consecutive blocks of len(conditions), shuffle each block."""
    k = len(conditions)
    if len(pretest) < k:
        raise TooFewStudents(f"need at least {k} students, got {len(pretest)}")
    order = sorted(pretest, key=lambda sid: (pretest[sid], sid))
    out: dict[str, str] = {}
    for start in range(0, len(order), k):
        block = order[start : start + k]
        perm = rng.permutation(k)
        for sid, ci in zip(block, perm):
            out[sid] = conditions[int(ci)]
    return out


# ---- scoring after the fact -------------------------------------------------


def fit_time_bounds(logs: Sequence[SessionLog], low_q: float = 10, high_q: float = 90) -> dict[str, TimeBounds]:
    """Per-problem fast/slow anchors from the 10th and 90th duration percentiles."""
    durations: dict[str, list[float]] = {}
    for log in logs:
        for r in log.attempts:
            if r.section != "intro":
                durations.setdefault(r.problem_id, []).append(r.attempt.duration_seconds)
    out = {}
    for pid, ds in sorted(durations.items()):
        lo, hi = np.percentile(ds, [low_q, high_q])
        if hi <= lo:
            hi = lo + 1.0
        out[pid] = TimeBounds(float(lo), float(hi))
    return out


def score_log(log: SessionLog, bounds: Mapping[str, TimeBounds]) -> SessionLog:
    for r in log.attempts:
        if r.section != "intro":
            r.score = composite_score(r.attempt, r.reference_steps, bounds[r.problem_id])
    return log


# ---- transitions ------------------------------------------------------------


@dataclass(frozen=True)
class TimeNormalizer:
    """Per-level min-max constants for training-problem durations."""

    low: dict[int, float]
    high: dict[int, float]

    @classmethod
    def fit(cls, logs: Sequence[SessionLog]) -> "TimeNormalizer":
        per: dict[int, list[float]] = {}
        for log in logs:
            for r in log.decisions():
                per.setdefault(r.level, []).append(r.attempt.duration_seconds)
        return cls({lv: min(v) for lv, v in per.items()}, {lv: max(v) for lv, v in per.items()})

    def __call__(self, level: int, seconds: float) -> float:
        lo, hi = self.low.get(level, 0.0), self.high.get(level, 0.0)
        if hi <= lo:
            return 0.0
        return min(1.0, max(0.0, (seconds - lo) / (hi - lo)))

    def to_dict(self) -> dict:
        return {"low": {str(k): v for k, v in self.low.items()}, "high": {str(k): v for k, v in self.high.items()}}

    @classmethod
    def from_dict(cls, d: dict) -> "TimeNormalizer":
        return cls({int(k): float(v) for k, v in d["low"].items()}, {int(k): float(v) for k, v in d["high"].items()})


def decision_test_score(log: SessionLog, level: int, last_level: int = 6) -> float:
    """Level-end score, blended with the posttest average for the final level."""
    end = log.level_end_score(level)
    if end is None:
        raise ValueError(f"{log.student_id} has no scored level-end test for level {level}")
    if level != last_level:
        return end
    post = test_score_average([r.score.composite for r in log.section("posttest")])
    return (end + post) / 2.0


def raw_decision_features(log: SessionLog) -> list[np.ndarray]:
    """Raw state before each decision, followed by the post-session state."""
    out = []
    for i, r in enumerate(log.attempts):
        if r.is_decision:
            out.append(raw_features(log.attempts[:i], r.level, r.slot))
    out.append(raw_features(log.attempts, 7, 0))
    return out


def build_transitions(
    logs: Sequence[SessionLog], normalizer: Normalizer, times: TimeNormalizer
) -> list[Transition]:
    out: list[Transition] = []
    for log in logs:
        states = [normalizer.transform(v) for v in raw_decision_features(log)]
        decisions = log.decisions()
        for k, r in enumerate(decisions):
            reward = compute_reward(decision_test_score(log, r.level), times(r.level, r.attempt.duration_seconds))
            out.append(
                Transition(states[k], r.type, reward, states[k + 1], k == len(decisions) - 1, log.student_id, k)
            )
    return out
