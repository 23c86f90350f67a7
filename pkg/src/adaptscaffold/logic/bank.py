"""Problem bank files: one JSON document per level."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Iterable

from .formula import parse, render
from .proof import Problem, ProofGraph, ProofNode, validate_proof

SCHEMA = "adaptscaffold.bank"
VERSION = 1


class InvalidProblem(ValueError):
    def __init__(self, problem_id: str, reason: str):
        super().__init__(f"problem {problem_id}: {reason}")
        self.problem_id = problem_id
        self.reason = reason


def problem_from_dict(d: dict) -> Problem:
    pid = d["id"]
    try:
        givens = tuple(parse(g) for g in d["givens"])
        conclusion = parse(d["conclusion"])
        nodes = []
        for n in d["solution"]:
            is_given = bool(n.get("given", False))
            nodes.append(
                ProofNode(
                    str(n["id"]),
                    parse(n["formula"]),
                    None if is_given else n.get("rule"),
                    tuple(str(p) for p in n.get("parents", ())),
                    is_given,
                )
            )
    except (KeyError, ValueError) as exc:
        raise InvalidProblem(pid, str(exc)) from exc
    derived = [n for n in nodes if not n.given]
    if not derived:
        raise InvalidProblem(pid, "solution has no derived nodes")
    concl_id = d.get("conclusionId") or derived[-1].id
    try:
        graph = ProofGraph(tuple(nodes), concl_id)
    except ValueError as exc:
        raise InvalidProblem(pid, str(exc)) from exc
    return Problem(
        id=pid,
        givens=givens,
        conclusion=conclusion,
        solution=graph,
        required_rules=frozenset(d.get("requiredRules", ())),
        difficulty=int(d.get("difficulty", pid.split(".")[0])),
    )


def problem_to_dict(p: Problem) -> dict:
    sol = []
    for n in p.solution.nodes:
        entry = {"id": n.id, "formula": render(n.formula)}
        if n.given:
            entry["given"] = True
        else:
            entry["rule"] = n.rule
            entry["parents"] = list(n.parents)
        sol.append(entry)
    return {
        "id": p.id,
        "difficulty": p.difficulty,
        "givens": [render(g) for g in p.givens],
        "conclusion": render(p.conclusion),
        "solution": sol,
        "requiredRules": sorted(p.required_rules),
    }


def check_problem(p: Problem) -> None:
    """Raise InvalidProblem unless the reference solution is a correct proof."""
    res = validate_proof(p.solution, p)
    if not res.valid:
        raise InvalidProblem(p.id, f"node {res.first_error}: {res.reason}")
    given_formulas = {n.formula for n in p.solution.givens()}
    if given_formulas != set(p.givens):
        raise InvalidProblem(p.id, "given nodes do not match the givens list")
    used = p.solution.rules_used()
    if used != p.required_rules:
        raise InvalidProblem(p.id, f"requiredRules {sorted(p.required_rules)} != rules used {sorted(used)}")


def load_level(path: Path) -> list[Problem]:
    doc = json.loads(Path(path).read_text())
    if doc.get("schema") != SCHEMA or doc.get("version") != VERSION:
        raise ValueError(f"{path}: unsupported bank schema {doc.get('schema')!r} v{doc.get('version')}")
    return [problem_from_dict(d) for d in doc["problems"]]


def _level_files(path: Path) -> list[Path]:
    path = Path(path)
    if path.is_file():
        return [path]
    files = sorted(path.glob("level*.json"), key=lambda f: int(f.stem.removeprefix("level")))
    if not files:
        raise FileNotFoundError(f"no level*.json files under {path}")
    return files


def load_bank(path: Path | None = None, validate: bool = True) -> dict[str, Problem]:
    """Load every level file under ``path`` (the bundled bank by default)."""
    if path is None:
        path = default_bank_path()
    problems: dict[str, Problem] = {}
    for f in _level_files(path):
        for p in load_level(f):
            if validate:
                check_problem(p)
            problems[p.id] = p
    return problems


def validate_bank(path: Path) -> list[InvalidProblem]:
    """Every problem-level error in the bank, in file order."""
    errors: list[InvalidProblem] = []
    for f in _level_files(path):
        doc = json.loads(Path(f).read_text())
        for d in doc.get("problems", []):
            try:
                check_problem(problem_from_dict(d))
            except InvalidProblem as exc:
                errors.append(exc)
    return errors


def write_level(path: Path, level: int, problems: Iterable[Problem]) -> None:
    doc = {"schema": SCHEMA, "version": VERSION, "level": level, "problems": [problem_to_dict(p) for p in problems]}
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def default_bank_path() -> Path:
    return Path(str(resources.files("adaptscaffold.logic") / "bank"))
