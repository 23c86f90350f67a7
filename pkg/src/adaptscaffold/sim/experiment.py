"""Population-level runs: historical corpus, DRL training corpus and the three-condition trial."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from ..bkt import ThresholdTable, compute_thresholds
from ..drl.ddqn import DdqnConfig, TrainedPolicy, Transition, train_ddqn
from ..drl.features import Normalizer
from ..records import SessionLog
from ..scoring import TimeBounds
from .curriculum import Curriculum
from .session import (
    CONDITIONS,
    PHASES,
    Policies,
    StudentStreams,
    TimeNormalizer,
    VariantPool,
    build_transitions,
    finish_session,
    fit_time_bounds,
    raw_decision_features,
    score_log,
    start_session,
    stratified_assign,
)
from .student import PopulationConfig

ASSIGN_STREAM = 99


def student_id(phase: str, index: int) -> str:
    prefix = {"history": "h", "drl-corpus": "d", "trial": "t"}[phase]
    return f"{prefix}{index:04d}"


def simulate_population(
    phase: str,
    n: int,
    master_seed: int,
    curriculum: Curriculum,
    pop: PopulationConfig,
    pool: VariantPool,
    policies: Policies = Policies(),
    bounds: Optional[Mapping[str, TimeBounds]] = None,
    conditions: Sequence[str] = CONDITIONS,
    forced: Optional[str] = None,
) -> tuple[list[SessionLog], dict[str, str]]:
    """Run ``n`` students of one phase.

    The history and drl-corpus phases serve problem types at random. The
    trial phase plays every pretest first, then stratifies students into
    ``conditions`` by pretest score (or puts all of them in ``forced``).
    """
    if phase not in PHASES:
        raise ValueError(f"unknown phase {phase!r}")
    if n < 1:
        raise ValueError("population size must be positive")
    states = [
        start_session(student_id(phase, i), StudentStreams.derive(master_seed, phase, i), curriculum, pop, pool, bounds)
        for i in range(n)
    ]
    if phase != "trial" or forced is not None:
        assignment = {s.student.student_id: forced or "Control" for s in states}
    else:
        if bounds is None:
            raise ValueError("the trial needs time bounds to score the pretest")
        pre = {s.student.student_id: s.log.pretest_score for s in states}
        rng = np.random.default_rng(np.random.SeedSequence([master_seed, PHASES.index(phase), ASSIGN_STREAM]))
        assignment = stratified_assign(pre, rng, conditions)
    logs = [
        finish_session(s, assignment[s.student.student_id], curriculum, policies, pop, pool, bounds) for s in states
    ]
    return logs, assignment


def history_phase(n, master_seed, curriculum, pop, pool) -> tuple[list[SessionLog], dict[str, TimeBounds]]:
    """Random-policy corpus; its durations define the scoring time bounds, then every log is scored."""
    logs, _ = simulate_population("history", n, master_seed, curriculum, pop, pool)
    bounds = fit_time_bounds(logs)
    for log in logs:
        score_log(log, bounds)
    return logs, bounds


def thresholds_from_logs(logs: Sequence[SessionLog]) -> ThresholdTable:
    return compute_thresholds(log.snapshots() for log in logs)


@dataclass
class Corpus:
    transitions: list[Transition]
    normalizer: Normalizer
    times: TimeNormalizer


def corpus_from_logs(logs: Sequence[SessionLog]) -> Corpus:
    raw = np.stack([v for log in logs for v in raw_decision_features(log)])
    normalizer = Normalizer.fit(raw)
    times = TimeNormalizer.fit(logs)
    return Corpus(build_transitions(logs, normalizer, times), normalizer, times)


def train_policy(corpus: Corpus, config: DdqnConfig) -> TrainedPolicy:
    policy = train_ddqn(corpus.transitions, config, corpus.normalizer)
    policy.extras["timeNormalizer"] = corpus.times.to_dict()
    policy.extras["transitions"] = len(corpus.transitions)
    return policy
