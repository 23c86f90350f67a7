"""Independent reference implementations used only by the tests."""

from itertools import product, permutations

from adaptscaffold.logic.formula import And, Imp, Not, Or, subformulas, variables
from adaptscaffold.logic.semantics import evaluate


def truth_table_entails(premises, conclusion):
    names = sorted(set().union(*(variables(f) for f in [*premises, conclusion])))
    for values in product([False, True], repeat=len(names)):
        env = dict(zip(names, values))
        if all(evaluate(p, env) for p in premises) and not evaluate(conclusion, env):
            return False
    return True


def derivable(rule, parents, universe):
    """Every statement the rule generates from the parent formulas.

    ``universe`` supplies the extra disjuncts Addition may introduce.
    """
    out = set()
    if rule == "Simp" and len(parents) == 1 and isinstance(parents[0], And):
        out |= {parents[0].left, parents[0].right}
    if rule == "Add" and len(parents) == 1:
        for x in universe:
            out |= {Or(parents[0], x), Or(x, parents[0])}
    if len(parents) == 2:
        for p, q in permutations(parents):
            if rule == "MP" and isinstance(p, Imp) and p.left == q:
                out.add(p.right)
            if rule == "MT" and isinstance(p, Imp) and q == Not(p.right):
                out.add(Not(p.left))
            if rule == "DS" and isinstance(p, Or):
                if q == Not(p.left):
                    out.add(p.right)
                if q == Not(p.right):
                    out.add(p.left)
            if rule == "HS" and isinstance(p, Imp) and isinstance(q, Imp) and p.right == q.left:
                out.add(Imp(p.left, q.right))
            if rule == "Conj":
                out.add(And(p, q))
            if rule == "Res" and isinstance(p, Or) and isinstance(q, Or):
                for a, ra in ((p.left, p.right), (p.right, p.left)):
                    for b, rb in ((q.left, q.right), (q.right, q.left)):
                        if a == Not(b) or b == Not(a):
                            out |= {Or(ra, rb), Or(rb, ra)}
    return out


def forward_closure(givens, rules, universe, rounds):
    """Saturate under the rules, keeping only statements inside ``universe``."""
    known = set(givens)
    for _ in range(rounds):
        new = set()
        for r in rules:
            for p in known:
                new |= derivable(r, [p], universe)
                for q in known:
                    new |= derivable(r, [p, q], universe)
        new &= universe
        if new <= known:
            break
        known |= new
    return known


def oracle_valid(graph):
    """Re-derive each justified node by generation instead of schema matching."""
    ids = {n.id: n for n in graph.nodes}
    universe = {s for n in graph.nodes for s in subformulas(n.formula)}
    for n in graph.nodes:
        if n.given:
            continue
        if n.rule is None or any(p not in ids for p in n.parents):
            return False
        parents = [ids[p].formula for p in n.parents]
        if n.formula not in derivable(n.rule, parents, universe):
            return False
    return True
