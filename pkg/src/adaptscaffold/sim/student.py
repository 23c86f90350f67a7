"""Synthetic learners: latent per-rule mastery, noisy rule applications, typed learning gains."""

from __future__ import annotations

from dataclasses import dataclass, field
import numpy as np

from ..logic.proof import Problem
from ..logic.rules import RULE_IDS
from ..logic.variants import BuggyVariant, GuidedVariant, make_buggy, make_guided
from ..scoring import ProblemAttempt, RuleApplication


class MissingVariant(ValueError):
    pass


@dataclass(frozen=True)
class PopulationConfig:
    """Distributions the simulated population is drawn from."""

    ability_alpha: float = 2.0
    ability_beta: float = 3.0
    # per-rule mastery ~ Beta(c * ability, c * (1 - ability))
    rule_concentration: float = 6.0
    # Guided beats Buggy below m = gain_guided / gain_buggy
    gain_ps: float = 0.20
    gain_guided: float = 0.20
    gain_buggy: float = 0.30
    gain_jitter: float = 0.1
    intro_gain: float = 0.02
    test_gain_factor: float = 0.1
    slip_range: tuple[float, float] = (0.05, 0.15)
    guess_range: tuple[float, float] = (0.10, 0.30)
    speed_sigma: float = 0.1
    hint_alpha: float = 2.0
    hint_beta: float = 5.0
    seconds_per_step: float = 30.0
    read_seconds: dict = field(default_factory=lambda: {"PS": 20.0, "Guided": 25.0, "Buggy": 45.0, "WE": 60.0})
    hint_seconds: float = 15.0
    duration_sigma: float = 0.15
    detour_rate: float = 0.5
    max_tries: int = 3
    guided_removal: float = 0.5
    buggy_bugs: int = 2

    def __post_init__(self):
        for g in (self.gain_ps, self.gain_guided, self.gain_buggy):
            if not 0 <= g <= 0.3:
                raise ValueError("type gains must lie in [0, 0.3]")
        if not 0 <= self.gain_jitter < 1:
            raise ValueError("gain_jitter must lie in [0, 1)")
        if not (0 <= self.slip_range[0] <= self.slip_range[1] < 0.5):
            raise ValueError("slip must lie in [0, 0.5)")
        if not (0 <= self.guess_range[0] <= self.guess_range[1] < 0.5):
            raise ValueError("guess must lie in [0, 0.5)")


@dataclass(frozen=True)
class SimStudentParams:
    student_id: str
    mastery: dict[str, float]
    gains: dict[str, float]
    slip: float
    guess: float
    speed: float
    hint_propensity: float


def sample_student(student_id: str, pop: PopulationConfig, rng: np.random.Generator) -> SimStudentParams:
    ability = rng.beta(pop.ability_alpha, pop.ability_beta)
    c = pop.rule_concentration
    mastery = {r: float(rng.beta(c * ability, c * (1 - ability))) for r in RULE_IDS}
    gains = {
        t: float(np.clip(g * (1 + rng.uniform(-pop.gain_jitter, pop.gain_jitter)), 0.0, 0.3))
        for t, g in (("PS", pop.gain_ps), ("Guided", pop.gain_guided), ("Buggy", pop.gain_buggy))
    }
    return SimStudentParams(
        student_id,
        mastery,
        gains,
        float(rng.uniform(*pop.slip_range)),
        float(rng.uniform(*pop.guess_range)),
        float(np.exp(rng.normal(0.0, pop.speed_sigma))),
        float(rng.beta(pop.hint_alpha, pop.hint_beta)),
    )


def p_correct(mastery: float, slip: float, guess: float) -> float:
    return mastery * (1 - slip) + (1 - mastery) * guess


def apply_gain(mastery: dict[str, float], rules, kind: str, gain: float) -> dict[str, float]:
    """Typed learning step. Buggy gains shrink with current mastery, so novices gain little."""
    out = dict(mastery)
    for r in rules:
        m = out[r]
        step = gain * (1 - m)
        if kind == "Buggy":
            step *= m
        out[r] = min(1.0, m + step)
    return out


@dataclass
class AttemptOutcome:
    attempt: ProblemAttempt
    hint_offsets: list[float]
    mastery: dict[str, float]
    observations: list[tuple[str, bool]]


def simulate_attempt(
    student: SimStudentParams,
    mastery: dict[str, float],
    problem: Problem,
    kind: str,
    rng: np.random.Generator,
    pop: PopulationConfig,
    variant: GuidedVariant | BuggyVariant | None = None,
    gain_scale: float = 1.0,
) -> AttemptOutcome:
    """Play one problem in the given representation.

    PS asks for every derived step, Guided for each missing justification and
    Buggy for a fix of each inserted bug. Each rule action succeeds with
    probability m(1 - slip) + (1 - m) guess; a failed action may trigger a
    hint and is retried until ``max_tries``, after which a bottom-out hint
    completes it without a further observation.
    """
    ref = problem.solution
    if kind == "Guided":
        if not isinstance(variant, GuidedVariant):
            raise MissingVariant(f"Guided attempt on {problem.id} needs a Guided variant")
        targets = [ref.node(nid).rule for nid in variant.missing]
    elif kind == "Buggy":
        if not isinstance(variant, BuggyVariant):
            raise MissingVariant(f"Buggy attempt on {problem.id} needs a Buggy variant")
        targets = [ref.node(b.node_id).rule for b in variant.bugs]
    elif kind == "PS":
        targets = [n.rule for n in ref.derived_nodes()]
    elif kind == "WE":
        targets = []
    else:
        raise ValueError(f"unknown problem type {kind!r}")

    apps: list[RuleApplication] = []
    hint_offsets: list[float] = []
    seconds = pop.read_seconds[kind]
    detours = 0
    for rule in targets:
        m = mastery[rule]
        prob = p_correct(m, student.slip, student.guess)
        for attempt_no in range(pop.max_tries + 1):
            seconds += pop.seconds_per_step * (1.6 - m)
            if attempt_no == pop.max_tries:
                # bottom-out hint: the tutor fills the step in, nothing is observed
                hint_offsets.append(seconds)
                seconds += pop.hint_seconds
                break
            ok = bool(rng.random() < prob)
            apps.append(RuleApplication(rule, ok))
            if ok:
                break
            if rng.random() < student.hint_propensity:
                hint_offsets.append(seconds)
                seconds += pop.hint_seconds
                prob = prob + (1 - prob) * 0.5
        if kind == "PS" and rng.random() < pop.detour_rate * (1 - m):
            detours += 1
            seconds += pop.seconds_per_step * (1.6 - m)

    duration = seconds * student.speed * float(np.exp(rng.normal(0.0, pop.duration_sigma)))
    steps = ref_steps = len(ref.derived_nodes())
    if kind == "PS":
        steps = ref_steps + detours
    exercised = sorted({n.rule for n in ref.derived_nodes()})
    if kind == "WE":
        new_mastery = apply_gain(mastery, exercised, "WE", pop.intro_gain * gain_scale)
    else:
        new_mastery = apply_gain(mastery, exercised, kind, student.gains[kind] * gain_scale)
    attempt = ProblemAttempt(
        student.student_id, problem.id, kind, apps, steps, max(duration, 1.0), len(hint_offsets)
    )
    return AttemptOutcome(attempt, hint_offsets, new_mastery, [(a.rule, a.correct) for a in apps])


def make_variant(problem: Problem, kind: str, pop: PopulationConfig, seed: int):
    if kind == "Guided":
        return make_guided(problem, pop.guided_removal, seed=seed)
    if kind == "Buggy":
        eligible = len([n for n in problem.solution.derived_nodes() if n.id != problem.solution.conclusion_id])
        return make_buggy(problem, min(pop.buggy_bugs, eligible), seed=seed)
    return None
