"""Session log records shared by the simulator, the policies and the reports."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional

from .scoring import ProblemAttempt, ProblemScore, RuleApplication

SECTIONS = ("intro", "pretest", "training", "level_end", "posttest")


@dataclass
class AttemptRecord:
    attempt: ProblemAttempt
    section: str
    reference_steps: int
    policy_choice: Optional[str] = None
    overridden: bool = False
    rationale: dict = field(default_factory=dict)
    hint_offsets: list[float] = field(default_factory=list)
    bkt: dict[str, float] = field(default_factory=dict)
    score: Optional[ProblemScore] = None

    @property
    def problem_id(self) -> str:
        return self.attempt.problem_id

    @property
    def level(self) -> int:
        return int(self.problem_id.split(".")[0])

    @property
    def slot(self) -> int:
        return int(self.problem_id.split(".")[1])

    @property
    def type(self) -> str:
        return self.attempt.assigned_type

    @property
    def is_decision(self) -> bool:
        return self.section == "training"

    def to_dict(self) -> dict:
        a = self.attempt
        return {
            "student": a.student_id,
            "problem": a.problem_id,
            "section": self.section,
            "type": a.assigned_type,
            "policyChoice": self.policy_choice,
            "overridden": self.overridden,
            "rationale": self.rationale,
            "applications": [[r.rule, r.correct] for r in a.rule_applications],
            "steps": a.steps_in_final_solution,
            "referenceSteps": self.reference_steps,
            "duration": a.duration_seconds,
            "hints": a.hints_requested,
            "hintOffsets": self.hint_offsets,
            "bkt": self.bkt,
            "score": None if self.score is None else asdict(self.score),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AttemptRecord":
        attempt = ProblemAttempt(
            d["student"],
            d["problem"],
            d["type"],
            [RuleApplication(r, bool(c)) for r, c in d["applications"]],
            int(d["steps"]),
            float(d["duration"]),
            int(d["hints"]),
        )
        score = None if d.get("score") is None else ProblemScore(**d["score"])
        return cls(
            attempt,
            d["section"],
            int(d["referenceSteps"]),
            d.get("policyChoice"),
            bool(d.get("overridden", False)),
            dict(d.get("rationale", {})),
            [float(x) for x in d.get("hintOffsets", [])],
            {k: float(v) for k, v in d.get("bkt", {}).items()},
            score,
        )


@dataclass
class SessionLog:
    student_id: str
    condition: str
    attempts: list[AttemptRecord] = field(default_factory=list)

    def section(self, name: str) -> list[AttemptRecord]:
        return [r for r in self.attempts if r.section == name]

    def _mean_score(self, name: str) -> Optional[float]:
        rs = [r.score.composite for r in self.section(name) if r.score is not None]
        return sum(rs) / len(rs) if rs else None

    @property
    def pretest_score(self) -> Optional[float]:
        return self._mean_score("pretest")

    @property
    def posttest_score(self) -> Optional[float]:
        return self._mean_score("posttest")

    def level_end_score(self, level: int) -> Optional[float]:
        rs = [r for r in self.section("level_end") if r.level == level and r.score is not None]
        return rs[0].score.composite if rs else None

    def snapshots(self) -> dict[str, dict[str, float]]:
        """Rule scores recorded after each problem, keyed by problem id."""
        return {r.problem_id: r.bkt for r in self.attempts}

    def decisions(self) -> list[AttemptRecord]:
        return [r for r in self.attempts if r.is_decision]
