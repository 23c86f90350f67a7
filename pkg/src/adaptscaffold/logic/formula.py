"""Propositional formula trees, an ASCII parser and a renderer.

Grammar (loosest to tightest binding)::

    iff   := imp ('<->' iff)?          right-associative
    imp   := or  ('->' imp)?           right-associative
    or    := and ('|' and)*            left-associative
    and   := unary ('&' unary)*        left-associative
    unary := '~' unary | atom
    atom  := LETTER | '(' iff ')'
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union


class FormulaSyntaxError(ValueError):
    """Malformed formula text. ``offset`` is the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class EmptyFormulaError(FormulaSyntaxError):
    def __init__(self):
        super().__init__("empty formula", 0)


@dataclass(frozen=True)
class Var:
    name: str

    def __post_init__(self):
        if len(self.name) != 1 or not ("A" <= self.name <= "Z"):
            raise ValueError(f"variable names are single letters A-Z, got {self.name!r}")


@dataclass(frozen=True)
class Not:
    child: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Imp:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


Formula = Union[Var, Not, And, Or, Imp, Iff]
Binary = (And, Or, Imp, Iff)

_SYMBOL = {And: "&", Or: "|", Imp: "->", Iff: "<->"}
# higher binds tighter
_PREC = {Iff: 1, Imp: 2, Or: 3, And: 4, Not: 5, Var: 6}


def _tokens(text: str) -> Iterator[tuple[str, int]]:
    raw = text.encode("ascii", errors="replace")
    i = 0
    while i < len(raw):
        c = chr(raw[i])
        if c.isspace():
            i += 1
        elif c in "~&|()":
            yield c, i
            i += 1
        elif raw.startswith(b"<->", i):
            yield "<->", i
            i += 3
        elif raw.startswith(b"->", i):
            yield "->", i
            i += 2
        elif "A" <= c <= "Z":
            yield c, i
            i += 1
        else:
            raise FormulaSyntaxError(f"unexpected character {c!r}", i)
    yield "", len(raw)


class _Parser:
    def __init__(self, text: str):
        self.toks = list(_tokens(text))
        self.pos = 0

    @property
    def tok(self) -> str:
        return self.toks[self.pos][0]

    @property
    def offset(self) -> int:
        return self.toks[self.pos][1]

    def take(self, tok: str) -> bool:
        if self.tok == tok:
            self.pos += 1
            return True
        return False

    def iff(self) -> Formula:
        left = self.imp()
        if self.take("<->"):
            return Iff(left, self.iff())
        return left

    def imp(self) -> Formula:
        left = self.disj()
        if self.take("->"):
            return Imp(left, self.imp())
        return left

    def disj(self) -> Formula:
        node = self.conj()
        while self.take("|"):
            node = Or(node, self.conj())
        return node

    def conj(self) -> Formula:
        node = self.unary()
        while self.take("&"):
            node = And(node, self.unary())
        return node

    def unary(self) -> Formula:
        if self.take("~"):
            return Not(self.unary())
        tok, off = self.tok, self.offset
        if self.take("("):
            inner = self.iff()
            if not self.take(")"):
                raise FormulaSyntaxError("expected ')'", self.offset)
            return inner
        if len(tok) == 1 and "A" <= tok <= "Z":
            self.pos += 1
            return Var(tok)
        if tok == "":
            raise FormulaSyntaxError("unexpected end of input", off)
        raise FormulaSyntaxError(f"unexpected token {tok!r}", off)


def parse(text: str) -> Formula:
    """Parse ASCII formula text into a tree.

    >>> parse("G & ~H")
    And(left=Var(name='G'), right=Not(child=Var(name='H')))
    """
    if not text or not text.strip():
        raise EmptyFormulaError()
    p = _Parser(text)
    node = p.iff()
    if p.tok != "":
        raise FormulaSyntaxError(f"trailing input {p.tok!r}", p.offset)
    return node


def render(f: Formula, full_parens: bool = False) -> str:
    """Render with the minimum parentheses the grammar needs (or all of them)."""
    if isinstance(f, Var):
        return f.name
    if isinstance(f, Not):
        inner = render(f.child, full_parens)
        if full_parens and not isinstance(f.child, (Var, Not)):
            inner = f"({inner})"
        elif not full_parens and _PREC[type(f.child)] < _PREC[Not]:
            inner = f"({inner})"
        return "~" + inner
    op = type(f)
    left = render(f.left, full_parens)
    right = render(f.right, full_parens)
    if full_parens:
        if not isinstance(f.left, (Var, Not)):
            left = f"({left})"
        if not isinstance(f.right, (Var, Not)):
            right = f"({right})"
    else:
        lp, rp = _PREC[type(f.left)], _PREC[type(f.right)]
        right_assoc = op in (Imp, Iff)
        if lp < _PREC[op] or (lp == _PREC[op] and right_assoc):
            left = f"({left})"
        if rp < _PREC[op] or (rp == _PREC[op] and not right_assoc):
            right = f"({right})"
    return f"{left} {_SYMBOL[op]} {right}"


def variables(f: Formula) -> set[str]:
    if isinstance(f, Var):
        return {f.name}
    if isinstance(f, Not):
        return variables(f.child)
    return variables(f.left) | variables(f.right)


def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, Not):
        yield from subformulas(f.child)
    elif isinstance(f, Binary):
        yield from subformulas(f.left)
        yield from subformulas(f.right)


def depth(f: Formula) -> int:
    if isinstance(f, Var):
        return 1
    if isinstance(f, Not):
        return 1 + depth(f.child)
    return 1 + max(depth(f.left), depth(f.right))


def negate(f: Formula) -> Formula:
    """Strip one leading negation if present, else add one."""
    return f.child if isinstance(f, Not) else Not(f)
