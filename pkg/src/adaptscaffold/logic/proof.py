"""Proof graphs, problems and step-by-step validation."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

from .formula import Formula
from .rules import ArityMismatch, check_rule_application, get_rule


class DanglingParent(ValueError):
    pass


class CycleDetected(ValueError):
    pass


@dataclass(frozen=True)
class ProofNode:
    """A statement in a proof. Givens have ``rule is None`` and no parents.

    A derived node whose justification has been removed keeps
    ``given=False`` with ``rule=None``.
    """

    id: str
    formula: Formula
    rule: Optional[str] = None
    parents: tuple[str, ...] = ()
    given: bool = False

    @property
    def derived(self) -> bool:
        return not self.given

    def with_justification(self, rule: Optional[str], parents: tuple[str, ...]) -> "ProofNode":
        return replace(self, rule=rule, parents=tuple(parents))


@dataclass(frozen=True)
class ProofGraph:
    nodes: tuple[ProofNode, ...]
    conclusion_id: str

    def __post_init__(self):
        ids = [n.id for n in self.nodes]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate node ids")
        if self.conclusion_id not in ids:
            raise ValueError(f"conclusion node {self.conclusion_id!r} missing")

    def node(self, node_id: str) -> ProofNode:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(node_id)

    @property
    def conclusion(self) -> ProofNode:
        return self.node(self.conclusion_id)

    def derived_nodes(self) -> list[ProofNode]:
        return [n for n in self.nodes if n.derived]

    def givens(self) -> list[ProofNode]:
        return [n for n in self.nodes if n.given]

    def replace_node(self, node: ProofNode) -> "ProofGraph":
        return ProofGraph(tuple(node if n.id == node.id else n for n in self.nodes), self.conclusion_id)

    def rules_used(self) -> frozenset[str]:
        return frozenset(n.rule for n in self.derived_nodes() if n.rule is not None)


@dataclass(frozen=True)
class Problem:
    id: str
    givens: tuple[Formula, ...]
    conclusion: Formula
    solution: ProofGraph
    required_rules: frozenset[str]
    difficulty: int

    @property
    def level(self) -> int:
        return int(self.id.split(".")[0])

    @property
    def index(self) -> int:
        return int(self.id.split(".")[1])

    @property
    def reference_steps(self) -> int:
        return len(self.solution.derived_nodes())


@dataclass(frozen=True)
class ValidationResult:
    valid: bool
    first_error: Optional[str] = None
    reason: str = ""

    def __bool__(self):
        return self.valid


def check_structure(graph: ProofGraph) -> None:
    """Raise DanglingParent or CycleDetected for malformed justification edges."""
    ids = {n.id for n in graph.nodes}
    for n in graph.nodes:
        for p in n.parents:
            if p not in ids:
                raise DanglingParent(f"node {n.id} cites missing parent {p}")
    parents = {n.id: n.parents for n in graph.nodes}
    state: dict[str, int] = {}  # 1 = on stack, 2 = done
    for root in parents:
        if root in state:
            continue
        stack = [(root, iter(parents[root]))]
        state[root] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                state[node] = 2
                stack.pop()
            elif state.get(nxt) == 1:
                raise CycleDetected(f"cycle through node {nxt}")
            elif nxt not in state:
                state[nxt] = 1
                stack.append((nxt, iter(parents[nxt])))


def check_node(graph: ProofGraph, node: ProofNode) -> str:
    """Empty string if the node's justification holds, else the reason it fails."""
    if node.given:
        return "" if not node.parents else "given node has parents"
    if node.rule is None:
        return "missing justification"
    try:
        rule = get_rule(node.rule)
    except KeyError:
        return f"unknown rule {node.rule}"
    premises = [graph.node(p).formula for p in node.parents]
    try:
        ok = check_rule_application(rule, premises, node.formula)
    except ArityMismatch:
        return f"{rule.id} needs {rule.arity} parent(s), has {len(premises)}"
    return "" if ok else f"{rule.id} does not yield this statement"


def validate_proof(graph: ProofGraph, problem: Optional[Problem] = None) -> ValidationResult:
    """Check every justification; optionally check givens and conclusion against a problem."""
    check_structure(graph)
    allowed_givens = set(problem.givens) if problem is not None else None
    for node in graph.nodes:
        if node.given and allowed_givens is not None and node.formula not in allowed_givens:
            return ValidationResult(False, node.id, "not one of the problem's givens")
        if node.id == graph.conclusion_id and node.given:
            return ValidationResult(False, node.id, "conclusion is not derived")
        reason = check_node(graph, node)
        if reason:
            return ValidationResult(False, node.id, reason)
    if problem is not None and graph.conclusion.formula != problem.conclusion:
        return ValidationResult(False, graph.conclusion_id, "conclusion differs from the problem's")
    return ValidationResult(True)
