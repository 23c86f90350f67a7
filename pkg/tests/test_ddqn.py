import time

import numpy as np
import pytest

from adaptscaffold.drl import (
    ACTIONS,
    DatasetTooSmall,
    DdqnConfig,
    Normalizer,
    OutOfRange,
    QNetwork,
    ShapeMismatch,
    TrainedPolicy,
    Transition,
    compute_reward,
    ddqn_targets,
    select_action,
    train_ddqn,
)
from adaptscaffold.drl.ddqn import dqn_targets


def test_reward_examples():
    assert compute_reward(80, 0.25) == 60
    assert compute_reward(57.3, 1.0) == 0
    assert compute_reward(100, 0.0) == 100


@pytest.mark.parametrize("score, t", [(-1, 0.5), (101, 0.5), (50, -0.1), (50, 1.1)])
def test_reward_out_of_range(score, t):
    with pytest.raises(OutOfRange):
        compute_reward(score, t)


def _linear_net(values):
    """Single-input linear net whose output at x = [1] is ``values``."""
    return QNetwork((1, 3), [np.array([values], dtype=float)], [np.zeros(3)])


def test_terminal_target_is_reward():
    net = _linear_net([1, 5, 2])
    t = Transition(np.ones(1), "PS", 42.0, np.ones(1), True)
    assert ddqn_targets([t], net, _linear_net([10, 3, 7]), 0.99)[0] == 42.0


def test_double_q_decouples_selection_from_evaluation():
    online, target = _linear_net([1, 5, 2]), _linear_net([10, 3, 7])
    t = Transition(np.ones(1), "PS", 0.0, np.ones(1), False)
    y = ddqn_targets([t], online, target, 0.99)[0]
    assert y == pytest.approx(2.97, abs=1e-12)
    plain = dqn_targets([0.0], np.ones((1, 1)), [False], target, 0.99)[0]
    assert plain == pytest.approx(9.9, abs=1e-12)
    assert y != pytest.approx(plain)


def test_target_shape_mismatch():
    t = Transition(np.ones(1), "PS", 0.0, np.ones(1), False)
    with pytest.raises(ShapeMismatch):
        ddqn_targets([t], _linear_net([1, 2, 3]), QNetwork((1, 4, 3)), 0.9)


def _finite_difference_check(dims, seed):
    rng = np.random.default_rng(seed)
    net = QNetwork(dims, rng=rng)
    for b in net.biases:
        b[:] = rng.normal(0, 0.1, size=b.shape)
    x = rng.normal(size=(7, dims[0]))
    a = rng.integers(0, dims[-1], size=7)
    y = rng.normal(size=7)
    _, grads = net.loss_and_grads(x, a, y)
    h = 1e-6
    worst = 0.0
    for p, g in zip(net.params, grads):
        for idx in np.ndindex(p.shape):
            old = p[idx]
            p[idx] = old + h
            up, _ = net.loss_and_grads(x, a, y)
            p[idx] = old - h
            down, _ = net.loss_and_grads(x, a, y)
            p[idx] = old
            num = (up - down) / (2 * h)
            denom = max(abs(num), abs(g[idx]), 1e-8)
            worst = max(worst, abs(num - g[idx]) / denom)
    return worst


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_gradients_match_finite_differences(seed):
    assert _finite_difference_check((4, 5, 3), seed) < 1e-4


def test_gradients_deeper_net():
    assert _finite_difference_check((3, 6, 4, 2), 7) < 1e-4


def test_select_action_unique_and_ties():
    pol = TrainedPolicy(_linear_net([0, 1, 0]), Normalizer.identity(), DdqnConfig())
    assert select_action(pol, np.ones(1)) == "Guided"
    pol = TrainedPolicy(_linear_net([0.5, 0.5, 0.1]), Normalizer.identity(), DdqnConfig())
    assert select_action(pol, np.ones(1)) == "PS"
    pol = TrainedPolicy(_linear_net([0.2, 0.7, 0.7]), Normalizer.identity(), DdqnConfig())
    assert select_action(pol, np.ones(1)) == "Guided"


# two states, two actions, deterministic moves: (state, action) -> (next state, reward)
TOY = {(0, 0): (0, 1.0), (0, 1): (1, 0.0), (1, 0): (0, 2.0), (1, 1): (1, 1.8)}
TOY_GAMMA = 0.5


def value_iteration(mdp, gamma, sweeps=2000):
    q = np.zeros((2, 2))
    for _ in range(sweeps):
        v = q.max(axis=1)
        q = np.array([[mdp[(s, a)][1] + gamma * v[mdp[(s, a)][0]] for a in range(2)] for s in range(2)])
    return q


def toy_dataset(copies=100):
    eye = np.eye(2)
    return [Transition(eye[s], a, r, eye[s2], False, "toy", i) for i, ((s, a), (s2, r)) in
            enumerate(TOY.items()) for _ in range(copies)]


TOY_CONFIG = DdqnConfig(learning_rate=1e-3, gamma=TOY_GAMMA, batch_size=32, target_sync=50, epochs=300,
                        seed=0, hidden=(32, 32))


def test_value_iteration_oracle_by_hand():
    q = value_iteration(TOY, TOY_GAMMA)
    # staying in each state is optimal: V0 = 1/(1-0.5), V1 = 1.8/(1-0.5)
    np.testing.assert_allclose(q, [[2.0, 1.8], [3.0, 3.6]], atol=1e-12)


def test_toy_mdp_recovers_optimal_q():
    start = time.perf_counter()
    pol = train_ddqn(toy_dataset(), TOY_CONFIG, actions=(0, 1))
    elapsed = time.perf_counter() - start
    q_star = value_iteration(TOY, TOY_GAMMA)
    q = pol.network.forward(np.eye(2))
    assert np.abs(q - q_star).max() < 0.05
    for s in range(2):
        assert select_action(pol, np.eye(2)[s]) == int(np.argmax(q_star[s]))
    assert elapsed < 60


def test_training_is_deterministic():
    cfg = DdqnConfig(gamma=TOY_GAMMA, batch_size=32, epochs=20, seed=3, hidden=(8,))
    a = train_ddqn(toy_dataset(20), cfg, actions=(0, 1))
    b = train_ddqn(toy_dataset(20), cfg, actions=(0, 1))
    assert a.loss_curve == b.loss_curve and a.held_out_curve == b.held_out_curve
    for p, q in zip(a.network.params, b.network.params):
        assert np.array_equal(p, q)


def test_dataset_too_small():
    with pytest.raises(DatasetTooSmall):
        train_ddqn(toy_dataset(5), DdqnConfig(batch_size=100))


def test_target_network_frozen_between_syncs(monkeypatch):
    """Record the target weights seen by every target computation."""
    from adaptscaffold.drl import ddqn

    seen = []
    real = ddqn.double_q_targets

    def spy(r, s2, t, online, target, gamma):
        seen.append([p.copy() for p in target.params])
        return real(r, s2, t, online, target, gamma)

    monkeypatch.setattr(ddqn, "double_q_targets", spy)
    cfg = DdqnConfig(gamma=TOY_GAMMA, batch_size=10, target_sync=5, epochs=3, seed=1, hidden=(4,),
                     held_out_fraction=0.2)
    ddqn.train_ddqn(toy_dataset(10), cfg, actions=(0, 1))
    # 32 training transitions -> 4 batches per epoch, plus one held-out evaluation per epoch
    train_calls = [w for i, w in enumerate(seen) if i % 5 != 4]
    for k in range(1, len(train_calls)):
        same = all(np.array_equal(p, q) for p, q in zip(train_calls[k - 1], train_calls[k]))
        if k % 5 != 0:
            assert same, f"target changed inside a sync window at step {k}"
        else:
            assert not same


def test_model_round_trip(tmp_path):
    data = toy_dataset(20)
    for t in data:
        t.action = ACTIONS[t.action]
    pol = train_ddqn(data, DdqnConfig(gamma=0.5, batch_size=16, epochs=3, hidden=(4,)), actions=ACTIONS[:2])
    pol.save(tmp_path / "m.json", header={"config_hash": "x"})
    back = TrainedPolicy.load(tmp_path / "m.json")
    np.testing.assert_array_equal(back.network.forward(np.eye(2)), pol.network.forward(np.eye(2)))
    assert back.config == pol.config
    back.save(tmp_path / "n.json", header={"config_hash": "x"})
    assert (tmp_path / "m.json").read_bytes() == (tmp_path / "n.json").read_bytes()


def test_full_size_network_outputs_three_finite_values():
    net = QNetwork((74, 64, 128, 64, 3), rng=np.random.default_rng(0))
    q = net.forward(np.random.default_rng(1).random(74))
    assert q.shape == (3,) and np.all(np.isfinite(q))
