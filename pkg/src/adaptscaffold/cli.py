"""Command-line entry point: ``adaptscaffold <verb> ...``."""

from __future__ import annotations

import argparse
import collections
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import io
from .config import ConfigError, ExperimentConfig, load_config
from .drl.ddqn import DdqnConfig, TrainedPolicy
from .logic.bank import default_bank_path, validate_bank
from .pipeline import (
    OUT_ENV,
    Context,
    PhaseError,
    pipeline,
    run_dir,
    run_phase,
    thresholds_from_history,
    train_from_transitions,
)


def _config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else ExperimentConfig()
    if getattr(args, "seed", None) is not None:
        cfg = cfg.with_seed(args.seed)
    return cfg


def cmd_validate_problems(args) -> int:
    path = Path(args.bank) if args.bank else default_bank_path()
    errors = validate_bank(path)
    for e in errors:
        print(e)
    print(f"{path}: {'ok' if not errors else f'{len(errors)} problem(s) invalid'}")
    return 0 if not errors else 1


def _context(args) -> Context:
    cfg = _config(args)
    d = run_dir(cfg, args.out)
    d.mkdir(parents=True, exist_ok=True)
    return Context(cfg, d)


def cmd_simulate(args) -> int:
    ctx = _context(args)
    run_phase(ctx, args.phase)
    print(ctx.dir)
    return 0


def cmd_bkt_thresholds(args) -> int:
    table = thresholds_from_history(Path(args.history), Path(args.output))
    print(f"wrote {len(table.positional)} positional and {len(table.fallback)} rule thresholds to {args.output}")
    return 0


def cmd_train_drl(args) -> int:
    ddqn = load_config(args.config).ddqn if args.config else DdqnConfig()
    if args.seed is not None:
        ddqn = DdqnConfig(**{**ddqn.__dict__, "seed": args.seed})
    policy = train_from_transitions(Path(args.transitions), Path(args.output), ddqn)
    print(
        f"best epoch {policy.best_epoch + 1}/{ddqn.epochs}, "
        f"held-out residual {policy.held_out_curve[policy.best_epoch]:.3f}, wrote {args.output}"
    )
    return 0


def cmd_eval_policy(args) -> int:
    policy = TrainedPolicy.load(Path(args.model))
    out = {
        "dims": list(policy.network.dims),
        "actions": list(policy.actions),
        "bestEpoch": policy.best_epoch,
        "heldOutResidual": policy.held_out_curve[policy.best_epoch],
        "trainingTransitions": policy.extras.get("transitions"),
    }
    if args.transitions:
        _, transitions = io.read_transitions(Path(args.transitions))
        states = np.stack([t.state for t in transitions])
        q = policy.q_values(states)
        greedy = q.argmax(axis=1)
        logged = [policy.actions.index(t.action) for t in transitions]
        out["greedyActions"] = dict(collections.Counter(policy.actions[i] for i in greedy))
        out["agreementWithLogged"] = float(np.mean(greedy == np.array(logged)))
        out["meanQ"] = {a: float(q[:, i].mean()) for i, a in enumerate(policy.actions)}
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


def cmd_report(args) -> int:
    ctx = _context(args)
    run_phase(ctx, "report")
    print(ctx.path("report.txt").read_text(), end="")
    return 0


def cmd_pipeline(args) -> int:
    d, ran = pipeline(_config(args), args.out, force=args.force)
    print(f"{d} (ran: {', '.join(ran) if ran else 'nothing, all phases up to date'})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="adaptscaffold", description="Adaptive scaffolding policy engine")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="verb", required=True)

    def experiment_args(sp):
        sp.add_argument("--config", type=Path, help="TOML or JSON experiment config")
        sp.add_argument("--seed", type=int, help="override masterSeed")
        sp.add_argument("--out", type=Path, help=f"output root (default ${OUT_ENV} or ./out)")

    sp = sub.add_parser("validate-problems", help="check every problem in a bank")
    sp.add_argument("bank", nargs="?", help="bank directory (bundled bank by default)")
    sp.set_defaults(func=cmd_validate_problems)

    sp = sub.add_parser("simulate", help="run one simulation phase")
    experiment_args(sp)
    sp.add_argument("--phase", required=True, choices=("history", "drl-corpus", "trial"))
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("bkt-thresholds", help="average historical rule scores per problem")
    sp.add_argument("history")
    sp.add_argument("-o", "--output", required=True)
    sp.set_defaults(func=cmd_bkt_thresholds)

    sp = sub.add_parser("train-drl", help="train the DDQN policy offline")
    sp.add_argument("transitions")
    sp.add_argument("-o", "--output", required=True)
    sp.add_argument("--config", type=Path)
    sp.add_argument("--seed", type=int)
    sp.set_defaults(func=cmd_train_drl)

    sp = sub.add_parser("eval-policy", help="summarise a trained model")
    sp.add_argument("model")
    sp.add_argument("--transitions", help="score the greedy policy against logged transitions")
    sp.set_defaults(func=cmd_eval_policy)

    sp = sub.add_parser("report", help="write the trial report")
    experiment_args(sp)
    sp.set_defaults(func=cmd_report)

    sp = sub.add_parser("pipeline", help="run all phases, skipping completed ones")
    experiment_args(sp)
    sp.add_argument("--force", action="store_true", help="rerun every phase")
    sp.set_defaults(func=cmd_pipeline)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (ConfigError, PhaseError, io.SchemaError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
