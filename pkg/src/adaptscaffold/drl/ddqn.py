"""Offline Double DQN: rewards, targets, training and greedy action selection."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .features import FEATURE_NAMES, STATE_DIM, Normalizer
from .network import Adam, QNetwork, ShapeMismatch

ACTIONS = ("PS", "Guided", "Buggy")  # argmax ties resolve to the earliest
MODEL_SCHEMA = "adaptscaffold.model"
MODEL_VERSION = 1


class OutOfRange(ValueError):
    pass


class DatasetTooSmall(ValueError):
    pass


def compute_reward(test_score: float, problem_time: float) -> float:
    """TestScore * (1 - ProblemTime), with ProblemTime already normalised to [0, 1]."""
    if not 0 <= test_score <= 100:
        raise OutOfRange(f"test score {test_score} outside [0, 100]")
    if not 0 <= problem_time <= 1:
        raise OutOfRange(f"normalised problem time {problem_time} outside [0, 1]")
    return test_score * (1.0 - problem_time)


@dataclass
class Transition:
    state: np.ndarray
    action: str
    reward: float
    next_state: np.ndarray
    terminal: bool
    student_id: str = ""
    decision_index: int = 0

    def to_dict(self) -> dict:
        return {
            "student": self.student_id,
            "decision": self.decision_index,
            "state": self.state.tolist(),
            "action": self.action,
            "reward": self.reward,
            "nextState": self.next_state.tolist(),
            "terminal": self.terminal,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Transition":
        return cls(
            np.asarray(d["state"], dtype=np.float64),
            d["action"],
            float(d["reward"]),
            np.asarray(d["nextState"], dtype=np.float64),
            bool(d["terminal"]),
            d.get("student", ""),
            int(d.get("decision", 0)),
        )


@dataclass(frozen=True)
class DdqnConfig:
    learning_rate: float = 1e-3
    gamma: float = 0.99
    batch_size: int = 100
    target_sync: int = 50
    epochs: int = 400
    seed: int = 0
    held_out_fraction: float = 0.2
    hidden: tuple[int, ...] = (64, 128, 64)

    def __post_init__(self):
        if not 0 < self.gamma <= 1:
            raise ValueError("gamma must lie in (0, 1]")
        if self.batch_size < 1 or self.target_sync < 1 or self.epochs < 1:
            raise ValueError("batch_size, target_sync and epochs must be positive")
        if not 0 <= self.held_out_fraction < 1:
            raise ValueError("held_out_fraction must lie in [0, 1)")


def double_q_targets(rewards, next_states, terminals, online: QNetwork, target: QNetwork, gamma: float):
    """Online network picks the successor action, target network values it."""
    if online.dims != target.dims:
        raise ShapeMismatch(f"online {online.dims} vs target {target.dims}")
    rewards = np.asarray(rewards, dtype=np.float64)
    terminals = np.asarray(terminals, dtype=bool)
    next_states = np.atleast_2d(np.asarray(next_states, dtype=np.float64))
    best = np.argmax(online.forward(next_states), axis=1)
    value = target.forward(next_states)[np.arange(len(best)), best]
    return rewards + gamma * np.where(terminals, 0.0, value)


def dqn_targets(rewards, next_states, terminals, target: QNetwork, gamma: float):
    """Plain DQN targets (max over the target network), kept for comparison."""
    q = target.forward(np.atleast_2d(next_states))
    return np.asarray(rewards) + gamma * np.where(np.asarray(terminals, dtype=bool), 0.0, q.max(axis=1))


def ddqn_targets(batch: Sequence[Transition], online: QNetwork, target: QNetwork, gamma: float) -> np.ndarray:
    return double_q_targets(
        [t.reward for t in batch],
        np.stack([t.next_state for t in batch]),
        [t.terminal for t in batch],
        online,
        target,
        gamma,
    )


@dataclass
class TrainedPolicy:
    network: QNetwork
    normalizer: Normalizer
    config: DdqnConfig
    actions: tuple[str, ...] = ACTIONS
    loss_curve: list[float] = field(default_factory=list)
    held_out_curve: list[float] = field(default_factory=list)
    best_epoch: int = 0
    extras: dict = field(default_factory=dict)

    def q_values(self, state: np.ndarray) -> np.ndarray:
        return self.network.forward(state)

    def to_dict(self, header: Optional[dict] = None) -> dict:
        return {
            "schema": MODEL_SCHEMA,
            "version": MODEL_VERSION,
            "header": header or {},
            "actions": list(self.actions),
            "features": list(FEATURE_NAMES) if self.network.dims[0] == STATE_DIM else [],
            "network": self.network.to_dict(),
            "normalizer": self.normalizer.to_dict(),
            "config": {**asdict(self.config), "hidden": list(self.config.hidden)},
            "seed": self.config.seed,
            "lossCurve": self.loss_curve,
            "heldOutCurve": self.held_out_curve,
            "bestEpoch": self.best_epoch,
            "extras": self.extras,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TrainedPolicy":
        if d.get("schema") != MODEL_SCHEMA or d.get("version") != MODEL_VERSION:
            raise ValueError(f"unsupported model schema {d.get('schema')!r} v{d.get('version')}")
        if d["features"] and tuple(d["features"]) != FEATURE_NAMES:
            raise ValueError("model feature registry differs from this build")
        cfg = dict(d["config"])
        cfg["hidden"] = tuple(cfg["hidden"])
        return cls(
            QNetwork.from_dict(d["network"]),
            Normalizer.from_dict(d["normalizer"]),
            DdqnConfig(**cfg),
            tuple(d["actions"]),
            list(d["lossCurve"]),
            list(d["heldOutCurve"]),
            int(d["bestEpoch"]),
            dict(d.get("extras", {})),
        )

    def save(self, path: Path, header: Optional[dict] = None) -> None:
        Path(path).write_text(json.dumps(self.to_dict(header), sort_keys=True) + "\n")

    @classmethod
    def load(cls, path: Path) -> "TrainedPolicy":
        return cls.from_dict(json.loads(Path(path).read_text()))


def select_action(policy: TrainedPolicy, state: np.ndarray) -> str:
    q = policy.q_values(state)
    return policy.actions[int(np.argmax(q))]


def _split(dataset: Sequence[Transition], fraction: float, rng: np.random.Generator):
    n = len(dataset)
    if fraction == 0:
        return np.arange(n), np.arange(0)
    students = sorted({t.student_id for t in dataset})
    if len(students) >= 5:
        # hold out whole students so correlated decisions stay together
        held = set(rng.permutation(students)[: max(1, round(fraction * len(students)))].tolist())
        mask = np.array([t.student_id in held for t in dataset])
        return np.flatnonzero(~mask), np.flatnonzero(mask)
    perm = rng.permutation(n)
    k = max(1, round(fraction * n))
    return np.sort(perm[k:]), np.sort(perm[:k])


def train_ddqn(
    dataset: Sequence[Transition],
    config: DdqnConfig = DdqnConfig(),
    normalizer: Optional[Normalizer] = None,
    actions: tuple[str, ...] = ACTIONS,
) -> TrainedPolicy:
    """Mini-batch Adam on the taken-action squared TD error.

    The target network is refreshed every ``config.target_sync`` gradient
    steps. After each epoch the online network is scored on the held-out
    transitions and the lowest-loss checkpoint is returned.
    """
    if len(dataset) < config.batch_size:
        raise DatasetTooSmall(f"{len(dataset)} transitions < batch size {config.batch_size}")
    rng = np.random.default_rng(config.seed)
    a_index = {a: i for i, a in enumerate(actions)}
    S = np.stack([t.state for t in dataset])
    S2 = np.stack([t.next_state for t in dataset])
    A = np.array([a_index[t.action] for t in dataset])
    R = np.array([t.reward for t in dataset], dtype=np.float64)
    T = np.array([t.terminal for t in dataset], dtype=bool)
    train_idx, held_idx = _split(dataset, config.held_out_fraction, rng)
    if len(train_idx) < config.batch_size:
        raise DatasetTooSmall(f"{len(train_idx)} training transitions < batch size {config.batch_size}")
    if len(held_idx) == 0:
        held_idx = train_idx

    dims = (S.shape[1], *config.hidden, len(actions))
    online = QNetwork(dims, rng=rng)
    target = online.copy()
    opt = Adam(online.params, lr=config.learning_rate)
    steps = 0
    best, best_loss, best_epoch = online.copy(), np.inf, 0
    loss_curve, held_curve = [], []
    for epoch in range(config.epochs):
        order = rng.permutation(train_idx)
        batch_losses = []
        for start in range(0, len(order), config.batch_size):
            b = order[start : start + config.batch_size]
            y = double_q_targets(R[b], S2[b], T[b], online, target, config.gamma)
            loss, grads = online.loss_and_grads(S[b], A[b], y)
            opt.step(online.params, grads)
            batch_losses.append(loss)
            steps += 1
            if steps % config.target_sync == 0:
                target.load_from(online)
        if not online.all_finite():
            raise FloatingPointError(f"non-finite weights after epoch {epoch}")
        # score the checkpoint on its own Bellman residual: a target network that
        # has not caught up would otherwise reward nets fitted to immediate reward
        y_held = double_q_targets(R[held_idx], S2[held_idx], T[held_idx], online, online, config.gamma)
        q_held = online.forward(S[held_idx])[np.arange(len(held_idx)), A[held_idx]]
        held_loss = float(np.mean((q_held - y_held) ** 2))
        loss_curve.append(float(np.mean(batch_losses)))
        held_curve.append(held_loss)
        if held_loss < best_loss:
            best, best_loss, best_epoch = online.copy(), held_loss, epoch
    return TrainedPolicy(
        best,
        normalizer if normalizer is not None else Normalizer.identity(),
        config,
        actions,
        loss_curve,
        held_curve,
        best_epoch,
    )
