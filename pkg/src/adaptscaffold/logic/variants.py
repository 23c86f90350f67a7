"""Guided (missing justifications) and Buggy (inserted errors) worked examples."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .formula import Formula, Imp, Not, Binary, subformulas
from .proof import Problem, ProofGraph, ProofNode, validate_proof
from .rules import RULE_IDS, get_rule


class NoDerivedNodes(ValueError):
    pass


class BugBudgetExceeded(ValueError):
    pass


@dataclass(frozen=True)
class GuidedVariant:
    base_problem_id: str
    graph: ProofGraph
    missing: tuple[str, ...]
    hints: dict[str, str]

    def complete(self, justifications: dict[str, tuple[str, tuple[str, ...]]]) -> ProofGraph:
        """Fill missing justifications with ``{node_id: (rule, parents)}``."""
        g = self.graph
        for node_id, (rule, parents) in justifications.items():
            g = g.replace_node(g.node(node_id).with_justification(rule, tuple(parents)))
        return g


def _hint(node: ProofNode) -> str:
    rule = get_rule(node.rule)
    return f"Derive {node.id} from {' and '.join(node.parents)}: apply {rule.hint_class}."


def make_guided(problem: Problem, removal_fraction: float = 1.0, seed: int = 0) -> GuidedVariant:
    if not 0 < removal_fraction <= 1:
        raise ValueError("removal_fraction must lie in (0, 1]")
    derived = problem.solution.derived_nodes()
    if len(derived) < 2:
        raise NoDerivedNodes(f"problem {problem.id} has {len(derived)} derived node(s); need 2")
    k = math.ceil(removal_fraction * len(derived) - 1e-12)
    rng = np.random.default_rng(seed)
    picked = set(rng.choice(len(derived), size=k, replace=False).tolist())
    chosen = [n for i, n in enumerate(derived) if i in picked]
    g = problem.solution
    for n in chosen:
        g = g.replace_node(n.with_justification(None, ()))
    return GuidedVariant(problem.id, g, tuple(n.id for n in chosen), {n.id: _hint(n) for n in chosen})


@dataclass(frozen=True)
class Bug:
    node_id: str
    kind: str  # "statement" | "rule"
    corrupted: Union[Formula, str]
    correct: Union[Formula, str]


def _apply(graph: ProofGraph, bug: Bug, value) -> ProofGraph:
    node = graph.node(bug.node_id)
    if bug.kind == "statement":
        return graph.replace_node(ProofNode(node.id, value, node.rule, node.parents, node.given))
    return graph.replace_node(node.with_justification(value, node.parents))


@dataclass(frozen=True)
class BuggyVariant:
    base_problem_id: str
    graph: ProofGraph
    bugs: tuple[Bug, ...]

    def fix(self, graph: ProofGraph, bug: Bug) -> ProofGraph:
        return _apply(graph, bug, bug.correct)

    def fix_all(self) -> ProofGraph:
        g = self.graph
        for b in self.bugs:
            g = self.fix(g, b)
        return g

    def remaining_bugs(self, graph: ProofGraph | None = None) -> int:
        """Bugs still present in ``graph`` (the variant's own graph by default)."""
        g = self.graph if graph is None else graph
        count = 0
        for b in self.bugs:
            node = g.node(b.node_id)
            current = node.formula if b.kind == "statement" else node.rule
            if current != b.correct:
                count += 1
        return count


def _drop_negation(f: Formula) -> Formula | None:
    if isinstance(f, Not):
        return f.child
    for sub in subformulas(f):
        if isinstance(sub, Not):
            return _replace_sub(f, sub, sub.child)
    return None


def _replace_sub(f: Formula, old: Formula, new: Formula) -> Formula:
    if f == old:
        return new
    if isinstance(f, Not):
        return Not(_replace_sub(f.child, old, new))
    if isinstance(f, Binary):
        left = _replace_sub(f.left, old, new)
        if left != f.left:
            return type(f)(left, f.right)
        return type(f)(f.left, _replace_sub(f.right, old, new))
    return f


def _statement_candidates(graph: ProofGraph, node: ProofNode) -> list[Formula]:
    out = []
    if node.rule == "Simp":
        parent = graph.node(node.parents[0]).formula
        other = parent.right if node.formula == parent.left else parent.left
        out.append(other)
    dropped = _drop_negation(node.formula)
    if dropped is not None:
        out.append(dropped)
    if isinstance(node.formula, Imp):
        out.append(Imp(node.formula.right, node.formula.left))
    return [f for f in out if f != node.formula]


def make_buggy(problem: Problem, bug_count: int, seed: int = 0) -> BuggyVariant:
    """Insert ``bug_count`` detectable errors on distinct derived, non-conclusion nodes."""
    ref = problem.solution
    eligible = [n for n in ref.derived_nodes() if n.id != ref.conclusion_id]
    if bug_count < 1 or bug_count > len(eligible):
        raise BugBudgetExceeded(
            f"bug_count={bug_count} outside 1..{len(eligible)} for problem {problem.id}"
        )
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(eligible))
    bugs: list[Bug] = []
    graph = ref
    for i in order:
        if len(bugs) == bug_count:
            break
        node = eligible[int(i)]
        stmt = [Bug(node.id, "statement", f, node.formula) for f in _statement_candidates(ref, node)]
        rules = [Bug(node.id, "rule", r, node.rule) for r in RULE_IDS if r != node.rule]
        rng.shuffle(rules)
        candidates = stmt + rules if rng.random() < 0.5 else rules + stmt
        for bug in candidates:
            if not validate_proof(_apply(ref, bug, bug.corrupted), problem).valid:
                bugs.append(bug)
                graph = _apply(graph, bug, bug.corrupted)
                break
    if len(bugs) < bug_count:
        raise BugBudgetExceeded(f"only {len(bugs)} detectable bugs available in {problem.id}")
    order_index = {n.id: k for k, n in enumerate(ref.nodes)}
    bugs.sort(key=lambda b: order_index[b.node_id])
    return BuggyVariant(problem.id, graph, tuple(bugs))
