from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pseudobosons.calogero import build_model
from pseudobosons.funcspace import Element, GradedSeries
from pseudobosons.opalg import commutator
from pseudobosons.opdsl import (
    BinOp,
    Comm,
    EvaluationError,
    Exp,
    IndexOutOfRangeError,
    Named,
    Neg,
    Num,
    OpContext,
    OpDslSyntaxError,
    Param,
    Pow,
    UnknownIdentifierError,
    Var,
    apply_ast,
    parse_element,
    parse_opdsl,
    render,
    to_diffop,
)

CTX = OpContext(2, 1, Fraction(3, 2))


def test_hamiltonian_expression(model_2):
    ast = parse_opdsl("omega*OE - 1/2*OL")
    assert ast == BinOp(
        "-", BinOp("*", Param("omega"), Named("OE")), BinOp("*", Num(Fraction(1, 2)), Named("OL"))
    )
    assert to_diffop(ast, CTX) == model_2.H_tilde


def test_commutator_expression(model_2):
    ast = parse_opdsl("comm(LAP, X2)")
    assert ast == Comm(Named("LAP"), Named("X2"))
    assert to_diffop(ast, CTX) == commutator(model_2.LAP, model_2.X2)


def test_precedence_and_associativity():
    assert parse_opdsl("x1 - x2 - d1") == BinOp("-", BinOp("-", Var("x", 1), Var("x", 2)), Var("d", 1))
    assert parse_opdsl("x1 + x2*d1") == BinOp("+", Var("x", 1), BinOp("*", Var("x", 2), Var("d", 1)))
    assert parse_opdsl("-x1^2") == Neg(Pow(Var("x", 1), Fraction(2)))
    assert parse_opdsl("D^(3/2)") == Pow(Named("D"), Fraction(3, 2))
    assert parse_opdsl("omega^-1") == Pow(Param("omega"), Fraction(-1))


def test_syntax_errors_carry_positions():
    with pytest.raises(OpDslSyntaxError) as info:
        parse_opdsl("x1*(")
    assert info.value.position == 4
    cases = {"x1 +": 4, "comm(x1 x2)": 8, "x1 $ x2": 3, "exp(1, x1": 9, "": 0, "1/0": 2}
    for text, pos in cases.items():
        with pytest.raises(OpDslSyntaxError) as info:
            parse_opdsl(text)
        assert info.value.position == pos, text


def test_identifier_errors():
    with pytest.raises(UnknownIdentifierError):
        parse_opdsl("foo*x1")
    with pytest.raises(IndexOutOfRangeError):
        parse_opdsl("x3")
    assert parse_opdsl("x3", 3) == Var("x", 3)
    with pytest.raises(IndexOutOfRangeError):
        parse_opdsl("d0")


def test_evaluation_errors():
    with pytest.raises(EvaluationError):
        to_diffop(parse_opdsl("exp(1, OL)"), CTX)
    with pytest.raises(EvaluationError):
        to_diffop(parse_opdsl("d1^-1"), CTX)
    with pytest.raises(EvaluationError):
        apply_ast(parse_opdsl("exp(x1, OL)"), Element.constant(2), CTX)


def test_elements():
    assert parse_element("x1^2 + x2^2", CTX) == Element.var(2, 0, 2) + Element.var(2, 1, 2)
    psi0 = parse_element("D^(3/2)*exp(-1/2, X2)", CTX)
    assert psi0 == build_model(2, 1, Fraction(3, 2)).psi0
    assert parse_element("x1*x2*D^-1", CTX) == Element.monomial((1, 1)) * Element.prefactor(2, -1)


def test_exponentials():
    s = parse_element("x1^2 + x2^2", CTX)
    out = apply_ast(parse_opdsl("exp(-1/4, OL)"), s, CTX)
    assert out == s - Element.constant(2, 4)
    ser = apply_ast(parse_opdsl("exp(-1/4, OL)"), parse_element("x1^2", CTX), CTX, "truncated", -4)
    assert isinstance(ser, GradedSeries) and ser.degrees() == [2, 0, -2, -4]
    chain = apply_ast(parse_opdsl("exp(1/4, LAP)*exp(1/2, X2)"), parse_element("exp(-1/2, X2)*(4*x1^2 - 2)", CTX), CTX)
    assert chain == Element.var(2, 0, 2) * 4


ATOMS = st.one_of(
    st.builds(Num, st.fractions(min_value=0, max_value=20, max_denominator=7)),
    st.sampled_from([Param("omega"), Param("nu")]),
    st.builds(Var, st.sampled_from(["x", "d"]), st.integers(1, 2)),
    st.sampled_from([Named(n) for n in ("OE", "OL", "LAP", "X2", "D")]),
)


def _extend(children):
    return st.one_of(
        st.builds(BinOp, st.sampled_from(["+", "-", "*"]), children, children),
        st.builds(Neg, children),
        st.builds(Pow, children, st.integers(-3, 4).map(Fraction)),
        st.builds(Pow, children, st.sampled_from([Fraction(3, 2), Fraction(-1, 2)])),
        st.builds(Comm, children, children),
        st.builds(Exp, children, children),
    )


ASTS = st.recursive(ATOMS, _extend, max_leaves=12)


@settings(max_examples=300)
@given(ASTS)
def test_render_round_trip(ast):
    text = render(ast)
    assert parse_opdsl(text) == ast
    assert render(parse_opdsl(text)) == text
