"""Per-rule Bayesian knowledge tracing and the Buggy-vs-Guided heuristic."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from ._core import bkt_trace
from .logic.rules import RULE_IDS


class EmptyHistory(ValueError):
    pass


@dataclass(frozen=True)
class BktParams:
    p_l0: float = 0.01
    p_transit: float = 0.01
    p_guess: float = 0.3
    p_slip: float = 0.1

    def __post_init__(self):
        for name in ("p_l0", "p_transit", "p_guess", "p_slip"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise ValueError(f"{name} must lie in (0, 1), got {v}")
        if self.p_guess + self.p_slip >= 1:
            raise ValueError("p_guess + p_slip must be below 1")


DEFAULT_PARAMS = BktParams()


def bkt_update(p: float, correct: bool, params: BktParams = DEFAULT_PARAMS) -> float:
    """Posterior mastery after one observation, followed by the learning transition."""
    if correct:
        num = p * (1 - params.p_slip)
        post = num / (num + (1 - p) * params.p_guess)
    else:
        num = p * params.p_slip
        post = num / (num + (1 - p) * (1 - params.p_guess))
    return post + (1 - post) * params.p_transit


@dataclass
class BktState:
    params: BktParams = DEFAULT_PARAMS
    scores: dict[str, float] = field(default_factory=dict)

    def score(self, rule: str) -> float:
        return self.scores.get(rule, self.params.p_l0)

    def observe(self, rule: str, correct: bool) -> float:
        self.scores[rule] = bkt_update(self.score(rule), correct, self.params)
        return self.scores[rule]

    def observe_many(self, rule: str, outcomes: Sequence[bool]) -> float:
        if len(outcomes) == 0:
            return self.score(rule)
        p = self.params
        trace = bkt_trace(self.score(rule), np.asarray(outcomes, dtype=np.uint8), p.p_transit, p.p_guess, p.p_slip)
        self.scores[rule] = float(trace[-1])
        return self.scores[rule]

    def snapshot(self) -> dict[str, float]:
        return dict(sorted(self.scores.items()))


Position = tuple[int, int]


@dataclass(frozen=True)
class ThresholdTable:
    positional: Mapping[tuple[int, int, str], float]
    fallback: Mapping[str, float]
    p_l0: float = DEFAULT_PARAMS.p_l0

    def threshold(self, position: Optional[Position], rule: str) -> float:
        if position is not None:
            v = self.positional.get((position[0], position[1], rule))
            if v is not None:
                return v
        return self.fallback.get(rule, self.p_l0)

    def to_dict(self) -> dict[str, float]:
        out = {f"{lv}.{ix}.{r}": round(v, 6) for (lv, ix, r), v in sorted(self.positional.items())}
        out.update({f"*.*.{r}": round(v, 6) for r, v in sorted(self.fallback.items())})
        return out

    @classmethod
    def from_dict(cls, d: Mapping[str, float], p_l0: float = DEFAULT_PARAMS.p_l0) -> "ThresholdTable":
        positional, fallback = {}, {}
        for key, v in d.items():
            lv, ix, rule = key.split(".", 2)
            if lv == "*":
                fallback[rule] = float(v)
            else:
                positional[(int(lv), int(ix), rule)] = float(v)
        return cls(positional, fallback, p_l0)

    def save(self, path: Path, header: Optional[dict] = None) -> None:
        doc = {"header": header or {}, "thresholds": self.to_dict()}
        Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path: Path) -> "ThresholdTable":
        doc = json.loads(Path(path).read_text())
        return cls.from_dict(doc["thresholds"])


def compute_thresholds(
    histories: Iterable[Mapping[str, Mapping[str, float]]], p_l0: float = DEFAULT_PARAMS.p_l0
) -> ThresholdTable:
    """Average historical rule scores at each problem position.

    Each history maps a problem id ("level.index") to the rule scores
    recorded right after that problem was completed.
    """
    sums: dict[tuple[int, int, str], list[float]] = {}
    per_rule: dict[str, list[float]] = {}
    n = 0
    for snaps in histories:
        n += 1
        for pid, scores in snaps.items():
            lv, ix = (int(x) for x in pid.split("."))
            for rule, v in scores.items():
                sums.setdefault((lv, ix, rule), []).append(v)
                per_rule.setdefault(rule, []).append(v)
    if n == 0:
        raise EmptyHistory("threshold computation needs at least one historical log")
    positional = {k: float(np.mean(v)) for k, v in sums.items()}
    fallback = {r: float(np.mean(v)) for r, v in per_rule.items()}
    return ThresholdTable(positional, fallback, p_l0)


def score_sign_sum(
    state: BktState,
    thresholds: ThresholdTable,
    position: Optional[Position],
    required_rules: Iterable[str],
    inventory: Sequence[str] = RULE_IDS,
) -> float:
    required = set(required_rules)
    total = 0.0
    for rule in inventory:
        sign = 1.0 if state.score(rule) > thresholds.threshold(position, rule) else -1.0
        total += (1.0 if rule in required else 0.5) * sign
    return total


def score_sign_decision(
    state: BktState,
    thresholds: ThresholdTable,
    position: Optional[Position],
    required_rules: Iterable[str],
    inventory: Sequence[str] = RULE_IDS,
) -> str:
    """Buggy when the weighted sign sum is positive, Guided otherwise (ties included)."""
    s = score_sign_sum(state, thresholds, position, required_rules, inventory)
    return "Buggy" if s > 0 else "Guided"


def bkt_condition_select(
    state: BktState,
    thresholds: ThresholdTable,
    position: Optional[Position],
    required_rules: Iterable[str],
    rng: np.random.Generator,
    inventory: Sequence[str] = RULE_IDS,
) -> tuple[str, dict]:
    """Coin flip between PS and a worked example; the heuristic picks the example type."""
    if rng.random() < 0.5:
        return "PS", {"branch": "PS"}
    s = score_sign_sum(state, thresholds, position, required_rules, inventory)
    return ("Buggy" if s > 0 else "Guided"), {"branch": "WE", "score_sign_sum": s}
