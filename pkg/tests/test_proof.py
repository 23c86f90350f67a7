import dataclasses

import pytest

from adaptscaffold.logic import CycleDetected, DanglingParent, ProofGraph, ProofNode, parse, validate_proof
from adaptscaffold.logic.bank import validate_bank, default_bank_path

from adaptscaffold.logic.formula import subformulas

from .oracles import forward_closure, oracle_valid


def test_reference_solutions_validate(bank):
    assert len(bank) == 30
    for p in bank.values():
        assert validate_proof(p.solution, p).valid, p.id


def test_required_rules_match_solution(bank):
    for p in bank.values():
        assert p.required_rules == p.solution.rules_used()


def test_single_rule_swap_is_caught(bank):
    p = bank["1.3"]
    target = next(n for n in p.solution.nodes if n.rule == "Simp")
    broken = p.solution.replace_node(dataclasses.replace(target, rule="Conj"))
    res = validate_proof(broken, p)
    assert not res.valid and res.first_error == target.id


def test_self_loop_is_a_cycle():
    g = ProofGraph(
        (ProofNode("1", parse("A"), given=True), ProofNode("2", parse("A & A"), "Conj", ("2", "1"))),
        "2",
    )
    with pytest.raises(CycleDetected):
        validate_proof(g)


def test_longer_cycle():
    g = ProofGraph(
        (
            ProofNode("1", parse("A & B"), given=True),
            ProofNode("2", parse("A"), "Simp", ("3",)),
            ProofNode("3", parse("A & B"), "Conj", ("2", "4")),
            ProofNode("4", parse("B"), "Simp", ("1",)),
        ),
        "3",
    )
    with pytest.raises(CycleDetected):
        validate_proof(g)


def test_dangling_parent():
    g = ProofGraph((ProofNode("1", parse("A & B"), given=True), ProofNode("2", parse("A"), "Simp", ("9",))), "2")
    with pytest.raises(DanglingParent):
        validate_proof(g)


def test_wrong_conclusion_flagged(bank):
    p = bank["1.1"]
    other = bank["1.2"]
    res = validate_proof(p.solution, other)
    assert not res.valid


def test_bundled_bank_has_no_errors():
    assert validate_bank(default_bank_path()) == []


def _mutations(graph):
    """Single-edit neighbours of a proof: rule swaps, statement swaps, parent swaps."""
    nodes = list(graph.nodes)
    formulas = [n.formula for n in nodes]
    for n in graph.derived_nodes():
        for r in ("MP", "MT", "DS", "HS", "Simp", "Conj", "Add", "Res"):
            if r != n.rule:
                yield graph.replace_node(dataclasses.replace(n, rule=r))
        for f in formulas:
            if f != n.formula:
                yield graph.replace_node(dataclasses.replace(n, formula=f))
        earlier = [m.id for m in nodes[: nodes.index(n)]]
        for k in range(len(n.parents)):
            for alt in earlier:
                if alt != n.parents[k]:
                    ps = list(n.parents)
                    ps[k] = alt
                    yield graph.replace_node(dataclasses.replace(n, parents=tuple(ps)))


def test_validate_agrees_with_rederivation_oracle(bank):
    small = [p for p in bank.values() if len(p.solution.nodes) <= 6]
    assert small
    checked = 0
    for p in small:
        assert oracle_valid(p.solution)
        for g in _mutations(p.solution):
            assert validate_proof(g).valid == oracle_valid(g)
            checked += 1
    assert checked > 300


def test_forward_chaining_reaches_conclusion(bank):
    for p in bank.values():
        universe = {s for n in p.solution.nodes for s in subformulas(n.formula)}
        closure = forward_closure(p.givens, sorted(p.required_rules), universe, rounds=len(p.solution.nodes))
        assert p.conclusion in closure, p.id
