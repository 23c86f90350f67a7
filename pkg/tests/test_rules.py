import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from adaptscaffold._core import fallback
from adaptscaffold.logic import ArityMismatch, check_rule_application, entails, parse
from adaptscaffold.logic.formula import And, Imp, Not, Or, Var, variables
from adaptscaffold.logic.semantics import TooManyVariables, compile_postfix, countermodel

from .conftest import formulas
from .oracles import truth_table_entails

P = parse


def test_simplification_from_figure():
    assert check_rule_application("Simp", [P("G & ~H")], P("~H"))


def test_self_conjunction():
    assert check_rule_application("Conj", [P("A"), P("A")], P("A & A"))


def test_affirming_the_consequent_rejected():
    assert not check_rule_application("MP", [P("A -> B"), P("B")], P("A"))
    assert not entails([P("A -> B"), P("B")], P("A"))


@pytest.mark.parametrize(
    "rule, premises, derived",
    [
        ("MP", ["A", "A -> B"], "B"),
        ("MT", ["~B", "A -> B"], "~A"),
        ("DS", ["A | B", "~B"], "A"),
        ("DS", ["~A", "A | B"], "B"),
        ("HS", ["B -> C", "A -> B"], "A -> C"),
        ("Conj", ["B", "A"], "A & B"),
        ("Add", ["A"], "C | A"),
        ("Res", ["A | B", "~A | C"], "B | C"),
        ("Res", ["~A | C", "B | A"], "C | B"),
    ],
)
def test_valid_applications(rule, premises, derived):
    assert check_rule_application(rule, [P(x) for x in premises], P(derived))


@pytest.mark.parametrize(
    "rule, premises, derived",
    [
        ("MT", ["A -> B", "~A"], "~B"),  # denying the antecedent
        ("DS", ["A | B", "A"], "~B"),
        ("HS", ["A -> B", "C -> B"], "A -> C"),
        ("Simp", ["A | B"], "A"),
        ("Add", ["A"], "A & B"),
        ("Res", ["A | B", "A | C"], "B | C"),
    ],
)
def test_invalid_applications(rule, premises, derived):
    assert not check_rule_application(rule, [P(x) for x in premises], P(derived))


def test_arity_mismatch():
    with pytest.raises(ArityMismatch):
        check_rule_application("MP", [P("A")], P("A"))
    with pytest.raises(ArityMismatch):
        check_rule_application("Simp", [P("A & B"), P("A")], P("A"))


@pytest.mark.parametrize(
    "premises, conclusion, expected",
    [(["A -> B", "A"], "B", True), (["A | B"], "A", False), (["G & ~H"], "~H", True)],
)
def test_entails_examples(premises, conclusion, expected):
    assert entails([P(x) for x in premises], P(conclusion)) is expected
    assert truth_table_entails([P(x) for x in premises], P(conclusion)) is expected


def test_too_many_variables():
    letters = "ABCDEFGHIJKLMNOPQRSTU"
    big = Var("A")
    for c in letters[1:]:
        big = Or(big, Var(c))
    with pytest.raises(TooManyVariables):
        entails([big], Var("A"))
    # twenty variables is still allowed
    assert entails([Or(big.left, Var("A"))], big.left)


def _schema_instance(rule, x, y, z):
    """Premises and conclusion instantiating the rule schema on arbitrary formulas."""
    return {
        "MP": ([Imp(x, y), x], y),
        "MT": ([Imp(x, y), Not(y)], Not(x)),
        "DS": ([Or(x, y), Not(x)], y),
        "HS": ([Imp(x, y), Imp(y, z)], Imp(x, z)),
        "Simp": ([And(x, y)], y),
        "Conj": ([x, y], And(y, x)),
        "Add": ([x], Or(z, x)),
        "Res": ([Or(x, y), Or(Not(x), z)], Or(y, z)),
    }[rule]


RULES = ["MP", "MT", "DS", "HS", "Simp", "Conj", "Add", "Res"]


@settings(max_examples=1000, deadline=None)
@given(st.sampled_from(RULES), formulas(max_leaves=3), formulas(max_leaves=3), formulas(max_leaves=3))
def test_schema_instances_are_sound(rule, x, y, z):
    premises, derived = _schema_instance(rule, x, y, z)
    assert check_rule_application(rule, premises, derived)
    assert entails(premises, derived)


@settings(max_examples=300, deadline=None)
@given(st.sampled_from(RULES), st.lists(formulas(max_leaves=3), min_size=2, max_size=2), formulas(max_leaves=3))
def test_check_implies_entailment_on_arbitrary_triples(rule, premises, derived):
    premises = premises[: 1 if rule in ("Simp", "Add") else 2]
    if check_rule_application(rule, premises, derived):
        assert truth_table_entails(premises, derived)


@settings(max_examples=300, deadline=None)
@given(formulas(letters="ABCDEFGH", max_leaves=10))
def test_compiled_and_numpy_kernels_agree(f):
    names = sorted(variables(f))
    code = np.asarray(compile_postfix(f, {n: i for i, n in enumerate(names)}), dtype=np.int32)
    from adaptscaffold import _core

    assert _core.first_countermodel(code, len(names)) == fallback.first_countermodel(code, len(names))


@settings(max_examples=200, deadline=None)
@given(st.lists(formulas(max_leaves=4), min_size=0, max_size=3), formulas(max_leaves=4))
def test_entails_matches_recursive_truth_table(premises, conclusion):
    assert entails(premises, conclusion) == truth_table_entails(premises, conclusion)
    cm = countermodel(premises, conclusion)
    if cm is not None:
        from adaptscaffold.logic.semantics import evaluate

        env = {v: cm.get(v, False) for v in "ABCD"}
        assert all(evaluate(p, env) for p in premises) and not evaluate(conclusion, env)
