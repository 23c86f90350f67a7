"""Per-problem composite scores and normalized learning gain."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

PROBLEM_TYPES = ("PS", "Guided", "Buggy")
# passive worked examples appear only in the introduction
ATTEMPT_TYPES = PROBLEM_TYPES + ("WE",)


class InvalidTimeBounds(ValueError):
    pass


class CeilingPretest(ValueError):
    pass


class EmptyList(ValueError):
    pass


@dataclass(frozen=True)
class RuleApplication:
    rule: str
    correct: bool


@dataclass
class ProblemAttempt:
    student_id: str
    problem_id: str
    assigned_type: str
    rule_applications: list[RuleApplication] = field(default_factory=list)
    steps_in_final_solution: int = 1
    duration_seconds: float = 1.0
    hints_requested: int = 0

    def __post_init__(self):
        if self.assigned_type not in ATTEMPT_TYPES:
            raise ValueError(f"unknown problem type {self.assigned_type!r}")
        if self.duration_seconds <= 0:
            raise ValueError("duration must be positive")
        if self.steps_in_final_solution < 1:
            raise ValueError("a completed attempt has at least one step")

    @property
    def accuracy(self) -> float:
        if not self.rule_applications:
            return 1.0
        return sum(a.correct for a in self.rule_applications) / len(self.rule_applications)


@dataclass(frozen=True)
class TimeBounds:
    fast: float
    slow: float

    def __post_init__(self):
        if not (0 <= self.fast < self.slow):
            raise InvalidTimeBounds(f"need 0 <= fast < slow, got {self.fast}, {self.slow}")


@dataclass(frozen=True)
class ProblemScore:
    accuracy: float
    optimality: float
    time_efficiency: float
    composite: float


def _clamp(x: float) -> float:
    return min(1.0, max(0.0, x))


def composite_score(attempt: ProblemAttempt, reference_steps: int, bounds: TimeBounds) -> ProblemScore:
    """Equal-weight combination of rule accuracy, solution optimality and speed, on 0-100."""
    if not isinstance(bounds, TimeBounds):
        bounds = TimeBounds(*bounds)
    accuracy = attempt.accuracy
    optimality = _clamp(reference_steps / attempt.steps_in_final_solution)
    time_eff = _clamp((bounds.slow - attempt.duration_seconds) / (bounds.slow - bounds.fast))
    composite = 100.0 * (accuracy + optimality + time_eff) / 3.0
    return ProblemScore(accuracy, optimality, time_eff, composite)


def nlg(pretest: float, posttest: float) -> float:
    """(post - pre) / sqrt(100 - pre)."""
    if pretest >= 100:
        raise CeilingPretest("normalized learning gain is undefined at a pretest score of 100")
    return (posttest - pretest) / math.sqrt(100.0 - pretest)


def test_score_average(scores: Sequence[float]) -> float:
    if len(scores) == 0:
        raise EmptyList("no scores to average")
    return math.fsum(scores) / len(scores)


# not a pytest test despite the name
test_score_average.__test__ = False
