"""Truth-table entailment, the semantic oracle for rule checks."""

from __future__ import annotations

import numpy as np

from .._core import first_countermodel
from .formula import And, Formula, Iff, Imp, Not, Or, Var, variables

MAX_VARIABLES = 20

_OPCODE = {Not: -1, And: -2, Or: -3, Imp: -4, Iff: -5}


class TooManyVariables(ValueError):
    pass


def compile_postfix(f: Formula, index: dict[str, int]) -> list[int]:
    """Postfix program: variable slots are >= 0, operators negative."""
    out: list[int] = []

    def emit(g: Formula) -> None:
        if isinstance(g, Var):
            out.append(index[g.name])
        elif isinstance(g, Not):
            emit(g.child)
            out.append(_OPCODE[Not])
        else:
            emit(g.left)
            emit(g.right)
            out.append(_OPCODE[type(g)])

    emit(f)
    return out


def _as_implication(premises: list[Formula], conclusion: Formula) -> Formula:
    if not premises:
        return conclusion
    conj = premises[0]
    for p in premises[1:]:
        conj = And(conj, p)
    return Imp(conj, conclusion)


def countermodel(premises: list[Formula], conclusion: Formula) -> dict[str, bool] | None:
    """An assignment making every premise true and the conclusion false, if any."""
    target = _as_implication(list(premises), conclusion)
    names = sorted(variables(target))
    if len(names) > MAX_VARIABLES:
        raise TooManyVariables(f"{len(names)} variables exceeds the limit of {MAX_VARIABLES}")
    index = {n: i for i, n in enumerate(names)}
    code = np.asarray(compile_postfix(target, index), dtype=np.int32)
    row = first_countermodel(code, len(names))
    if row < 0:
        return None
    return {n: bool((row >> i) & 1) for n, i in index.items()}


def entails(premises: list[Formula], conclusion: Formula) -> bool:
    return countermodel(premises, conclusion) is None


def evaluate(f: Formula, assignment: dict[str, bool]) -> bool:
    """Direct recursive evaluation; independent of the postfix kernels."""
    if isinstance(f, Var):
        return assignment[f.name]
    if isinstance(f, Not):
        return not evaluate(f.child, assignment)
    a, b = evaluate(f.left, assignment), evaluate(f.right, assignment)
    if isinstance(f, And):
        return a and b
    if isinstance(f, Or):
        return a or b
    if isinstance(f, Imp):
        return (not a) or b
    return a == b
