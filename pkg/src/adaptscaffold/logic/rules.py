"""Inference rule inventory and schema checks."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

from .formula import And, Formula, Imp, Not, Or


class ArityMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Rule:
    id: str
    arity: int
    display_name: str
    hint_class: str


RULES: dict[str, Rule] = {
    r.id: r
    for r in (
        Rule("MP", 2, "Modus Ponens", "an implication together with its antecedent"),
        Rule("MT", 2, "Modus Tollens", "an implication together with the negation of its consequent"),
        Rule("DS", 2, "Disjunctive Syllogism", "a disjunction together with the negation of one disjunct"),
        Rule("HS", 2, "Hypothetical Syllogism", "two chained implications"),
        Rule("Simp", 1, "Simplification", "a conjunction split into one of its conjuncts"),
        Rule("Conj", 2, "Conjunction", "two statements joined with AND"),
        Rule("Add", 1, "Addition", "a statement widened with OR"),
        Rule("Res", 2, "Resolution", "two disjunctions with a complementary pair"),
    )
}
RULE_IDS: tuple[str, ...] = tuple(RULES)


def get_rule(rule: str | Rule) -> Rule:
    if isinstance(rule, Rule):
        return rule
    try:
        return RULES[rule]
    except KeyError:
        raise KeyError(f"unknown rule {rule!r}") from None


def _complementary(a: Formula, b: Formula) -> bool:
    return a == Not(b) or b == Not(a)


def _mp(p, q, d):
    return isinstance(p, Imp) and p.left == q and p.right == d


def _mt(p, q, d):
    return isinstance(p, Imp) and q == Not(p.right) and d == Not(p.left)


def _ds(p, q, d):
    if not isinstance(p, Or):
        return False
    return (q == Not(p.left) and d == p.right) or (q == Not(p.right) and d == p.left)


def _hs(p, q, d):
    return (
        isinstance(p, Imp)
        and isinstance(q, Imp)
        and isinstance(d, Imp)
        and p.right == q.left
        and d.left == p.left
        and d.right == q.right
    )


def _conj(p, q, d):
    return isinstance(d, And) and d.left == p and d.right == q


def _res(p, q, d):
    if not (isinstance(p, Or) and isinstance(q, Or) and isinstance(d, Or)):
        return False
    for x, rest_p in ((p.left, p.right), (p.right, p.left)):
        for y, rest_q in ((q.left, q.right), (q.right, q.left)):
            if _complementary(x, y) and (d.left, d.right) in ((rest_p, rest_q), (rest_q, rest_p)):
                return True
    return False


def _simp(p, d):
    return isinstance(p, And) and d in (p.left, p.right)


def _add(p, d):
    return isinstance(d, Or) and p in (d.left, d.right)


_BINARY = {"MP": _mp, "MT": _mt, "DS": _ds, "HS": _hs, "Conj": _conj, "Res": _res}
_UNARY = {"Simp": _simp, "Add": _add}


def check_rule_application(rule: str | Rule, premises: list[Formula], derived: Formula) -> bool:
    """Does ``derived`` follow from ``premises`` by the rule's schema?

    Premise order does not matter.

    >>> from .formula import parse
    >>> check_rule_application("Simp", [parse("G & ~H")], parse("~H"))
    True
    """
    r = get_rule(rule)
    if len(premises) != r.arity:
        raise ArityMismatch(f"{r.id} takes {r.arity} premise(s), got {len(premises)}")
    if r.arity == 1:
        return _UNARY[r.id](premises[0], derived)
    fn = _BINARY[r.id]
    return any(fn(p, q, derived) for p, q in permutations(premises))
