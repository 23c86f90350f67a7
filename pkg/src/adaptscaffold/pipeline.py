"""Phase orchestration with content-addressed output directories and incremental reruns."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

from . import io
from .bkt import ThresholdTable
from .config import ExperimentConfig, write_resolved
from .drl.ddqn import TrainedPolicy, train_ddqn
from .drl.features import Normalizer
from .logic.bank import load_bank
from .report import build_report, render_delimited, render_text
from .scoring import TimeBounds
from .sim.curriculum import Curriculum
from .sim.experiment import corpus_from_logs, simulate_population, thresholds_from_logs
from .sim.session import Policies, VariantPool, fit_time_bounds, score_log

log = logging.getLogger(__name__)

OUT_ENV = "ADAPTSCAFFOLD_OUT"
THRESHOLDS = "adaptscaffold.thresholds"

ARTIFACTS = {
    "history": ("history.jsonl", "bounds.json"),
    "thresholds": ("thresholds.json",),
    "drl-corpus": ("drl-corpus.jsonl", "transitions.jsonl"),
    "train": ("model.json",),
    "trial": ("trial.jsonl",),
    "report": ("report.txt", "report.tsv"),
}
PHASE_ORDER = tuple(ARTIFACTS)


class PhaseError(RuntimeError):
    def __init__(self, phase: str, path: Path, cause: str):
        self.phase, self.path = phase, path
        super().__init__(f"phase {phase} failed at {path}: {cause}")


def output_root(explicit: Optional[Path] = None) -> Path:
    if explicit is not None:
        return Path(explicit)
    return Path(os.environ.get(OUT_ENV, "out"))


def run_dir(config: ExperimentConfig, root: Optional[Path] = None) -> Path:
    return output_root(root) / config.hash()


@dataclass
class Context:
    config: ExperimentConfig
    dir: Path

    def path(self, name: str) -> Path:
        return self.dir / name

    def header(self, schema: str, **extra) -> dict:
        return io.header(schema, self.config.hash(), self.config.master_seed, **extra)

    def text_header(self) -> str:
        return f"# adaptscaffold report configHash={self.config.hash()} masterSeed={self.config.master_seed}"

    def curriculum(self) -> Curriculum:
        return Curriculum.from_bank(load_bank(self.config.bank))

    def pool(self) -> VariantPool:
        return VariantPool(self.config.student)

    def require(self, phase: str, name: str) -> Path:
        p = self.path(name)
        if not p.exists():
            raise PhaseError(phase, p, "required input is missing; run the earlier phases first")
        return p


# ---- artifact helpers -------------------------------------------------------


def save_bounds(path: Path, bounds: dict[str, TimeBounds], head: dict) -> None:
    io.write_json(path, {"header": head, "bounds": {k: [b.fast, b.slow] for k, b in sorted(bounds.items())}})


def load_bounds(path: Path) -> dict[str, TimeBounds]:
    doc = io.read_json(path, io.BOUNDS)
    return {k: TimeBounds(*v) for k, v in doc["bounds"].items()}


def thresholds_from_history(history_path: Path, out: Path) -> ThresholdTable:
    head, logs = io.read_sessions(history_path)
    table = thresholds_from_logs(logs)
    table.save(out, {**head, "schema": THRESHOLDS})
    return ThresholdTable.load(out)


def train_from_transitions(path: Path, out: Path, config) -> TrainedPolicy:
    head, transitions = io.read_transitions(path)
    policy = train_ddqn(transitions, config, Normalizer.from_dict(head["normalizer"]))
    policy.extras["timeNormalizer"] = head["timeNormalizer"]
    policy.extras["transitions"] = len(transitions)
    policy.save(out, {k: v for k, v in head.items() if k in ("configHash", "masterSeed")})
    return policy


# ---- phases -----------------------------------------------------------------


def phase_history(ctx: Context) -> None:
    cfg = ctx.config
    logs, _ = simulate_population("history", cfg.population.history, cfg.master_seed, ctx.curriculum(), cfg.student, ctx.pool())
    sc = cfg.scoring
    bounds = fit_time_bounds(logs, sc.fast_percentile, sc.slow_percentile)
    for session in logs:
        score_log(session, bounds)
    save_bounds(ctx.path("bounds.json"), bounds, ctx.header(io.BOUNDS))
    io.write_sessions(ctx.path("history.jsonl"), logs, ctx.header(io.SESSIONS, phase="history"))


def phase_thresholds(ctx: Context) -> None:
    thresholds_from_history(ctx.require("thresholds", "history.jsonl"), ctx.path("thresholds.json"))


def phase_drl_corpus(ctx: Context) -> None:
    cfg = ctx.config
    bounds = load_bounds(ctx.require("drl-corpus", "bounds.json"))
    logs, _ = simulate_population(
        "drl-corpus", cfg.population.drl_corpus, cfg.master_seed, ctx.curriculum(), cfg.student, ctx.pool(), bounds=bounds
    )
    corpus = corpus_from_logs(logs)
    io.write_sessions(ctx.path("drl-corpus.jsonl"), logs, ctx.header(io.SESSIONS, phase="drl-corpus"))
    io.write_transitions(
        ctx.path("transitions.jsonl"),
        corpus.transitions,
        ctx.header(io.TRANSITIONS, normalizer=corpus.normalizer.to_dict(), timeNormalizer=corpus.times.to_dict()),
    )


def phase_train(ctx: Context) -> None:
    train_from_transitions(ctx.require("train", "transitions.jsonl"), ctx.path("model.json"), ctx.config.ddqn)


def phase_trial(ctx: Context) -> None:
    cfg = ctx.config
    bounds = load_bounds(ctx.require("trial", "bounds.json"))
    thresholds = ThresholdTable.load(ctx.require("trial", "thresholds.json"))
    model = TrainedPolicy.load(ctx.require("trial", "model.json"))
    logs, _ = simulate_population(
        "trial", cfg.population.trial, cfg.master_seed, ctx.curriculum(), cfg.student, ctx.pool(),
        Policies(thresholds, model), bounds,
    )
    io.write_sessions(ctx.path("trial.jsonl"), logs, ctx.header(io.SESSIONS, phase="trial"))


def phase_report(ctx: Context) -> None:
    _, logs = io.read_sessions(ctx.require("report", "trial.jsonl"))
    rep = build_report(logs, ctx.text_header(), ctx.config.report.bootstrap_iterations, ctx.config.master_seed)
    io.atomic_write(ctx.path("report.txt"), render_text(rep))
    io.atomic_write(ctx.path("report.tsv"), render_delimited(rep))


PHASES: dict[str, Callable[[Context], None]] = {
    "history": phase_history,
    "thresholds": phase_thresholds,
    "drl-corpus": phase_drl_corpus,
    "train": phase_train,
    "trial": phase_trial,
    "report": phase_report,
}


def _complete(ctx: Context, phase: str) -> bool:
    return all(ctx.path(name).exists() for name in ARTIFACTS[phase])


def run_phase(ctx: Context, phase: str) -> None:
    log.info("running phase %s in %s", phase, ctx.dir)
    try:
        PHASES[phase](ctx)
    except PhaseError:
        raise
    except Exception as e:  # surface the phase and where it was writing
        raise PhaseError(phase, ctx.path(ARTIFACTS[phase][0]), f"{type(e).__name__}: {e}") from e


def pipeline(config: ExperimentConfig, root: Optional[Path] = None, force: bool = False) -> tuple[Path, list[str]]:
    """Run every phase whose outputs are missing or whose inputs were rebuilt.

    Returns the run directory and the phases that executed.
    """
    ctx = Context(config, run_dir(config, root))
    ctx.dir.mkdir(parents=True, exist_ok=True)
    write_resolved(config, ctx.path("config.json"))
    ran: list[str] = []
    dirty = force
    for phase in PHASE_ORDER:
        if dirty or not _complete(ctx, phase):
            run_phase(ctx, phase)
            ran.append(phase)
            dirty = True
        else:
            log.info("phase %s up to date", phase)
    return ctx.dir, ran
