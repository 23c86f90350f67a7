import pytest
from hypothesis import given, strategies as st

from adaptscaffold.scoring import (
    CeilingPretest,
    EmptyList,
    InvalidTimeBounds,
    ProblemAttempt,
    RuleApplication,
    TimeBounds,
    composite_score,
    nlg,
    test_score_average as average,
)


def _attempt(correct, total, steps, duration):
    apps = [RuleApplication("MP", i < correct) for i in range(total)]
    return ProblemAttempt("s1", "2.1", "PS", apps, steps, duration)


def test_perfect_attempt_scores_100():
    s = composite_score(_attempt(6, 6, 6, 60.0), 6, TimeBounds(60.0, 600.0))
    assert s.composite == pytest.approx(100.0)


def test_midpoint_components():
    s = composite_score(_attempt(5, 10, 12, 330.0), 6, TimeBounds(60.0, 600.0))
    assert (s.accuracy, s.optimality, s.time_efficiency) == pytest.approx((0.5, 0.5, 0.5))
    assert s.composite == pytest.approx(50.0)


def test_hand_evaluated_composite():
    s = composite_score(_attempt(8, 10, 8, 330.0), 6, TimeBounds(60.0, 600.0))
    assert s.composite == pytest.approx(100 * (0.8 + 0.75 + 0.5) / 3)
    assert round(s.composite, 2) == 68.33


def test_no_applications_means_full_accuracy():
    assert composite_score(_attempt(0, 0, 4, 60.0), 4, TimeBounds(60, 120)).accuracy == 1.0


def test_invalid_bounds():
    with pytest.raises(InvalidTimeBounds):
        TimeBounds(100.0, 100.0)


@pytest.mark.parametrize("pre, post, expected", [(70, 70, 0.0), (36, 68, 4.0), (84, 68, -4.0)])
def test_nlg(pre, post, expected):
    assert nlg(pre, post) == pytest.approx(expected, abs=1e-9)


def test_nlg_ceiling():
    with pytest.raises(CeilingPretest):
        nlg(100, 90)


@pytest.mark.parametrize("scores, expected", [([100], 100), ([60, 80], 70), ([65.7, 72.3, 72.5], 70.1667)])
def test_average(scores, expected):
    assert average(scores) == pytest.approx(expected, abs=1e-4)


def test_average_empty():
    with pytest.raises(EmptyList):
        average([])


attempts = st.builds(
    lambda c, extra, steps, dur: _attempt(c, c + extra, steps, dur),
    st.integers(0, 20),
    st.integers(0, 20),
    st.integers(1, 30),
    st.floats(0.5, 5000),
)


@given(attempts, st.integers(1, 30))
def test_ranges(a, ref):
    s = composite_score(a, ref, TimeBounds(30.0, 900.0))
    for v in (s.accuracy, s.optimality, s.time_efficiency):
        assert 0 <= v <= 1
    assert 0 <= s.composite <= 100


@given(st.integers(0, 10), st.integers(1, 10), st.integers(1, 30), st.floats(1, 2000), st.floats(0, 500))
def test_monotonicity(correct, wrong, steps, dur, delta):
    b = TimeBounds(30.0, 900.0)
    base = composite_score(_attempt(correct, correct + wrong, steps, dur), 5, b).composite
    assert composite_score(_attempt(correct + 1, correct + wrong, steps, dur), 5, b).composite >= base
    assert composite_score(_attempt(correct, correct + wrong, steps + 1, dur), 5, b).composite <= base
    assert composite_score(_attempt(correct, correct + wrong, steps, dur + delta), 5, b).composite <= base


@given(st.floats(0, 99.9), st.floats(0, 100))
def test_nlg_sign(pre, post):
    g = nlg(pre, post)
    assert (g > 0) == (post > pre) and (g < 0) == (post < pre)
