"""The 74-slot state representation used by the DRL policy.

Raw features are computed from a student's attempt records up to a decision
point. Slots without data are NaN in the raw vector and take the registry
default after normalisation. Counts, times and rates are min-max scaled with
constants fitted on the training corpus; ratios and flags are already in
[0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..logic.rules import RULE_IDS
from ..records import AttemptRecord
from ..scoring import PROBLEM_TYPES

STATE_DIM = 74
LEVELS = tuple(range(1, 8))
SCALED_KINDS = ("count", "time", "rate")
DEFAULTS = {"ratio": 0.5, "time": 0.5, "count": 0.0, "rate": 0.0, "flag": 0.0}


class RegistryMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Feature:
    name: str
    group: str
    kind: str
    description: str

    @property
    def default(self) -> float:
        return DEFAULTS[self.kind]


def _build_registry() -> tuple[Feature, ...]:
    f = []
    slots = [f"rule:{r}" for r in RULE_IDS] + [f"level:{lv}" for lv in LEVELS] + [f"type:{t}" for t in PROBLEM_TYPES]
    for s in slots:
        f.append(Feature(f"mastery.{s}.estimate", "mastery", "ratio", f"mean BKT estimate over rules exercised in {s}"))
        f.append(Feature(f"mastery.{s}.accuracy", "mastery", "ratio", f"fraction of correct rule applications in {s}"))
    for lv in LEVELS:
        f.append(Feature(f"temporal.level{lv}.mean_time", "temporal", "time", f"mean problem time in level {lv}"))
    f.append(Feature("temporal.last_problem_time", "temporal", "time", "duration of the previous problem"))
    f.append(Feature("temporal.session_duration", "temporal", "time", "elapsed tutor time"))
    f.append(Feature("temporal.since_last_hint", "temporal", "time", "time since the most recent hint request"))
    for t in PROBLEM_TYPES:
        f.append(Feature(f"temporal.{t}.mean_time", "temporal", "time", f"mean time on {t} problems"))
    f.append(Feature("temporal.last_level_end_time", "temporal", "time", "duration of the latest level-end test"))
    f.append(Feature("help.hints_total", "help", "count", "hint requests so far"))
    f.append(Feature("help.hints_per_problem", "help", "rate", "hint requests per problem"))
    f.append(Feature("help.hints_last_problem", "help", "count", "hint requests on the previous problem"))
    for t in PROBLEM_TYPES:
        f.append(Feature(f"help.{t}.hints_per_problem", "help", "rate", f"hint requests per {t} problem"))
    f.append(Feature("help.error_rate", "help", "ratio", "fraction of incorrect rule applications"))
    for t in PROBLEM_TYPES:
        f.append(Feature(f"help.{t}.error_rate", "help", "ratio", f"fraction of incorrect applications in {t}"))
    f.append(Feature("help.error_rate_last_problem", "help", "ratio", "error fraction on the previous problem"))
    f.append(Feature("help.hinted_problem_fraction", "help", "ratio", "fraction of problems with any hint"))
    for t in PROBLEM_TYPES:
        f.append(Feature(f"history.{t}.count", "history", "count", f"{t} problems completed"))
    for t in PROBLEM_TYPES:
        f.append(Feature(f"history.{t}.fraction", "history", "ratio", f"share of training problems that were {t}"))
    f.append(Feature("history.level_progress", "history", "ratio", "current level / 7"))
    for s in (1, 2, 3):
        f.append(Feature(f"history.slot{s}", "history", "flag", f"decision is for training slot {s}"))
    f.append(Feature("history.pretest_score", "history", "ratio", "pretest composite / 100"))
    f.append(Feature("history.last_level_end_score", "history", "ratio", "latest level-end composite / 100"))
    return tuple(f)


REGISTRY: tuple[Feature, ...] = _build_registry()
FEATURE_NAMES: tuple[str, ...] = tuple(x.name for x in REGISTRY)
assert len(REGISTRY) == STATE_DIM and len(set(FEATURE_NAMES)) == STATE_DIM


def _ratio(num: float, den: float) -> float:
    return num / den if den else np.nan


def _mean(xs) -> float:
    xs = list(xs)
    return float(np.mean(xs)) if xs else np.nan


def raw_features(history: Sequence[AttemptRecord], level: int, slot: int) -> np.ndarray:
    """Unscaled features for the decision before training problem ``level.slot``."""
    out: list[float] = []
    bkt = history[-1].bkt if history else {}

    def apps(records):
        return [a for r in records for a in r.attempt.rule_applications]

    def est(rules):
        vals = [bkt[r] for r in rules if r in bkt]
        return _mean(vals)

    def acc(applications):
        return _ratio(sum(a.correct for a in applications), len(applications))

    for rule in RULE_IDS:
        rule_apps = [a for a in apps(history) if a.rule == rule]
        out += [bkt.get(rule, np.nan), acc(rule_apps)]
    for lv in LEVELS:
        recs = [r for r in history if r.level == lv]
        out += [est({a.rule for a in apps(recs)}), acc(apps(recs))]
    for t in PROBLEM_TYPES:
        recs = [r for r in history if r.type == t]
        per = [np.mean([r.bkt[a.rule] for a in r.attempt.rule_applications if a.rule in r.bkt]) for r in recs
               if any(a.rule in r.bkt for a in r.attempt.rule_applications)]
        out += [_mean(per), acc(apps(recs))]

    durations = [r.attempt.duration_seconds for r in history]
    for lv in LEVELS:
        out.append(_mean(r.attempt.duration_seconds for r in history if r.level == lv))
    out.append(durations[-1] if history else np.nan)
    out.append(float(sum(durations)) if history else np.nan)
    elapsed = 0.0
    last_hint = None
    for r in history:
        for off in r.hint_offsets:
            last_hint = elapsed + off
        elapsed += r.attempt.duration_seconds
    out.append(elapsed - last_hint if last_hint is not None else np.nan)
    for t in PROBLEM_TYPES:
        out.append(_mean(r.attempt.duration_seconds for r in history if r.type == t))
    ends = [r for r in history if r.section == "level_end"]
    out.append(ends[-1].attempt.duration_seconds if ends else np.nan)

    hints = [r.attempt.hints_requested for r in history]
    out.append(float(sum(hints)) if history else np.nan)
    out.append(_ratio(sum(hints), len(hints)))
    out.append(float(hints[-1]) if history else np.nan)
    for t in PROBLEM_TYPES:
        hs = [r.attempt.hints_requested for r in history if r.type == t]
        out.append(_ratio(sum(hs), len(hs)))
    all_apps = apps(history)
    out.append(_ratio(sum(not a.correct for a in all_apps), len(all_apps)))
    for t in PROBLEM_TYPES:
        ta = apps([r for r in history if r.type == t])
        out.append(_ratio(sum(not a.correct for a in ta), len(ta)))
    last_apps = history[-1].attempt.rule_applications if history else []
    out.append(_ratio(sum(not a.correct for a in last_apps), len(last_apps)))
    out.append(_ratio(sum(h > 0 for h in hints), len(hints)))

    training = [r for r in history if r.section == "training"]
    for t in PROBLEM_TYPES:
        out.append(float(sum(r.type == t for r in history)) if history else np.nan)
    for t in PROBLEM_TYPES:
        out.append(_ratio(sum(r.type == t for r in training), len(training)))
    out.append(level / 7.0)
    out += [1.0 if slot == s else 0.0 for s in (1, 2, 3)]
    pre = [r.score.composite for r in history if r.section == "pretest" and r.score is not None]
    out.append(_mean(pre) / 100.0 if pre else np.nan)
    out.append(ends[-1].score.composite / 100.0 if ends and ends[-1].score is not None else np.nan)
    vec = np.asarray(out, dtype=np.float64)
    if vec.shape != (STATE_DIM,):
        raise RegistryMismatch(f"extractor produced {vec.shape[0]} features, registry has {STATE_DIM}")
    return vec


@dataclass(frozen=True)
class Normalizer:
    low: np.ndarray
    high: np.ndarray

    @classmethod
    def fit(cls, raw: np.ndarray, registry: Sequence[Feature] = REGISTRY) -> "Normalizer":
        raw = np.atleast_2d(raw)
        low = np.zeros(len(registry))
        high = np.ones(len(registry))
        for i, f in enumerate(registry):
            if f.kind in SCALED_KINDS:
                col = raw[:, i][np.isfinite(raw[:, i])]
                if col.size:
                    low[i], high[i] = float(col.min()), float(col.max())
        return cls(low, high)

    @classmethod
    def identity(cls, registry: Sequence[Feature] = REGISTRY) -> "Normalizer":
        return cls(np.zeros(len(registry)), np.ones(len(registry)))

    def transform(self, raw: np.ndarray, registry: Sequence[Feature] = REGISTRY) -> np.ndarray:
        raw = np.asarray(raw, dtype=np.float64)
        span = self.high - self.low
        with np.errstate(invalid="ignore", divide="ignore"):
            scaled = np.where(span > 0, (raw - self.low) / np.where(span > 0, span, 1.0), 0.0)
        scaled = np.clip(scaled, 0.0, 1.0)
        defaults = np.array([f.default for f in registry])
        return np.where(np.isfinite(raw), scaled, defaults if raw.ndim == 1 else defaults[None, :])

    def to_dict(self) -> dict:
        return {"low": self.low.tolist(), "high": self.high.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "Normalizer":
        return cls(np.asarray(d["low"], dtype=np.float64), np.asarray(d["high"], dtype=np.float64))


def extract_state(
    history: Sequence[AttemptRecord],
    level: int,
    slot: int,
    normalizer: Normalizer | None = None,
    registry: Sequence[Feature] = REGISTRY,
) -> np.ndarray:
    if len(registry) != STATE_DIM:
        raise RegistryMismatch(f"registry has {len(registry)} features, expected {STATE_DIM}")
    norm = normalizer if normalizer is not None else Normalizer.identity(registry)
    return norm.transform(raw_features(history, level, slot), registry)


def registry_table() -> str:
    """Markdown table documenting every slot."""
    lines = ["| # | name | group | kind | default | description |", "|---|---|---|---|---|---|"]
    for i, f in enumerate(REGISTRY):
        lines.append(f"| {i} | `{f.name}` | {f.group} | {f.kind} | {f.default} | {f.description} |")
    return "\n".join(lines) + "\n"
