from pathlib import Path

import numpy as np
import pytest

from adaptscaffold.bkt import BktState
from adaptscaffold.drl.features import (
    FEATURE_NAMES,
    REGISTRY,
    STATE_DIM,
    Normalizer,
    RegistryMismatch,
    extract_state,
    raw_features,
    registry_table,
)
from adaptscaffold.records import AttemptRecord
from adaptscaffold.scoring import ProblemAttempt, RuleApplication, TimeBounds, composite_score
from adaptscaffold.sim import raw_decision_features, simulate_population

import adaptscaffold.drl as drl_pkg


def test_registry_shape_and_groups():
    assert len(REGISTRY) == STATE_DIM == 74
    assert len(set(FEATURE_NAMES)) == 74
    groups = {}
    for f in REGISTRY:
        groups[f.group] = groups.get(f.group, 0) + 1
    assert groups == {"mastery": 36, "temporal": 14, "help": 12, "history": 12}


def test_shipped_table_matches_registry():
    shipped = Path(drl_pkg.__file__).parent / "features.md"
    assert registry_table() in shipped.read_text()


def test_cold_start_is_all_defaults():
    s = extract_state([], 2, 1)
    expected = np.array([f.default for f in REGISTRY])
    flags = [i for i, f in enumerate(REGISTRY) if f.name.startswith("history.slot") or f.name == "history.level_progress"]
    mask = np.ones(STATE_DIM, bool)
    mask[flags] = False
    np.testing.assert_array_equal(s[mask], expected[mask])
    assert s[FEATURE_NAMES.index("history.slot1")] == 1.0
    assert s[FEATURE_NAMES.index("history.level_progress")] == pytest.approx(2 / 7)


def test_registry_length_checked():
    with pytest.raises(RegistryMismatch):
        extract_state([], 2, 1, registry=REGISTRY[:-1])


def _history(bank, correct: bool, seconds: float):
    """Pretest plus level-2 problems where every rule action has the same outcome."""
    bkt = BktState()
    out = []
    bounds = TimeBounds(30.0, 600.0)
    for pid, section, kind in [("1.3", "pretest", "PS"), ("1.4", "pretest", "PS"),
                               ("2.1", "training", "Guided"), ("2.2", "training", "Buggy")]:
        p = bank[pid]
        apps = [RuleApplication(n.rule, correct) for n in p.solution.derived_nodes()]
        for a in apps:
            bkt.observe(a.rule, a.correct)
        attempt = ProblemAttempt("s", pid, kind, apps, p.reference_steps, seconds, 0)
        rec = AttemptRecord(attempt, section, p.reference_steps, bkt=bkt.snapshot())
        rec.score = composite_score(attempt, p.reference_steps, bounds)
        out.append(rec)
    return out


def test_all_correct_dominates_all_incorrect_on_mastery(bank):
    good = extract_state(_history(bank, True, 60.0), 2, 3)
    bad = extract_state(_history(bank, False, 400.0), 2, 3)
    mastery = [i for i, f in enumerate(REGISTRY) if f.group == "mastery"]
    assert (good[mastery] >= bad[mastery]).all()
    assert (good[mastery] > bad[mastery]).any()


@pytest.fixture(scope="module")
def fuzz_histories(curriculum, world):
    logs, _ = simulate_population(
        "drl-corpus", 70, 5, curriculum, world["pop"], world["pool"], bounds=world["bounds"]
    )
    return logs


def test_states_in_unit_interval_over_1000_histories(fuzz_histories, world):
    fit_logs = fuzz_histories[:35]
    norm = Normalizer.fit(np.stack([v for log in fit_logs for v in raw_decision_features(log)]))
    count = 0
    for log in fuzz_histories:
        for i in range(len(log.attempts) + 1):
            s = norm.transform(raw_features(log.attempts[:i], 4, 2))
            assert s.shape == (74,)
            assert np.isfinite(s).all()
            assert ((s >= 0) & (s <= 1)).all()
            count += 1
    assert count >= 1000


def test_normalizer_round_trip():
    rng = np.random.default_rng(0)
    raw = rng.uniform(0, 50, (20, STATE_DIM))
    n = Normalizer.fit(raw)
    m = Normalizer.from_dict(n.to_dict())
    np.testing.assert_array_equal(n.transform(raw[3]), m.transform(raw[3]))
