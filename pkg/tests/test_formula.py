import pytest
from hypothesis import given

from adaptscaffold.logic.formula import (
    And,
    EmptyFormulaError,
    FormulaSyntaxError,
    Iff,
    Imp,
    Not,
    Or,
    Var,
    parse,
    render,
)

from .conftest import formulas


def test_parse_figure_statement():
    assert parse("G & ~H") == And(Var("G"), Not(Var("H")))


def test_parse_atom():
    assert parse("A") == Var("A")


def test_parse_precedence():
    expected = Imp(Not(Or(Var("A"), Var("B"))), And(Var("C"), Var("D")))
    got = parse("~(A | B) -> C & D")
    assert got == expected
    # fully parenthesised rendering must reparse to the same tree
    assert render(got, full_parens=True) == "~(A | B) -> (C & D)"
    assert parse(render(got, full_parens=True)) == expected


@pytest.mark.parametrize(
    "text, tree",
    [
        ("A -> B -> C", Imp(Var("A"), Imp(Var("B"), Var("C")))),
        ("A & B & C", And(And(Var("A"), Var("B")), Var("C"))),
        ("A | B | C", Or(Or(Var("A"), Var("B")), Var("C"))),
        ("A <-> B <-> C", Iff(Var("A"), Iff(Var("B"), Var("C")))),
        ("A | B & C", Or(Var("A"), And(Var("B"), Var("C")))),
        ("A -> B <-> C", Iff(Imp(Var("A"), Var("B")), Var("C"))),
        ("~~A", Not(Not(Var("A")))),
    ],
)
def test_associativity_and_precedence(text, tree):
    assert parse(text) == tree


@pytest.mark.parametrize("text, offset", [("A &", 3), ("(A | B", 6), ("A B", 2), ("a", 0), ("A -> )", 5)])
def test_syntax_errors_report_offset(text, offset):
    with pytest.raises(FormulaSyntaxError) as info:
        parse(text)
    assert info.value.offset == offset


@pytest.mark.parametrize("text", ["", "   "])
def test_empty_input(text):
    with pytest.raises(EmptyFormulaError):
        parse(text)


@given(formulas())
def test_render_parse_round_trip(f):
    assert parse(render(f)) == f
    assert parse(render(f, full_parens=True)) == f


def test_bank_render_fixed_point(bank):
    for p in bank.values():
        for n in p.solution.nodes:
            once = render(parse(render(n.formula)))
            assert render(parse(once)) == once == render(n.formula)
