"""Grammar: tokenizing, precedence, errors with byte offsets, equations."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from odecubic import ParseError, parse_equation, parse_expression, to_string
from odecubic.expr import K_CONST, K_POW


def test_basic_shapes():
    e = parse_expression("6*y^2")
    assert to_string(e) == "6*y^2"
    e = parse_expression("y^(3/2) + exp(x)/y")
    assert e.a.payload == Fraction(3, 2)


def test_double_star_is_error_at_offset_2():
    with pytest.raises(ParseError) as err:
        parse_expression("6**y")
    assert err.value.offset == 2


def test_unknown_identifier_with_offset():
    with pytest.raises(ParseError) as err:
        parse_expression("x + spam")
    assert "spam" in str(err.value)
    assert err.value.offset == 4


def test_unknown_function():
    with pytest.raises(ParseError):
        parse_expression("sin(x)")


def test_params_must_be_declared():
    with pytest.raises(ParseError):
        parse_expression("a*y")
    e = parse_expression("a*y", params=["a"])
    assert e.a.payload == "a"


def test_derivative_marks_only_in_equations():
    with pytest.raises(ParseError):
        parse_expression("y' + x")
    with pytest.raises(ParseError):
        parse_expression("p + x")
    lhs, rhs = parse_equation("y'' = y' + p")
    assert lhs.payload == "q"
    # y' is rewritten to the same variable as p
    assert rhs.a is rhs.b


def test_equation_needs_single_equals():
    with pytest.raises(ParseError):
        parse_equation("y'' + y")
    with pytest.raises(ParseError):
        parse_equation("y'' = y = 0")


def test_precedence_and_unary_minus():
    # unary minus binds looser than ^ and tighter than *
    e = parse_expression("-x^2")
    assert to_string(e) == "-x^2"
    assert e.kind == 8 and e.a.kind == K_POW
    assert to_string(parse_expression("2 - -x")) == "2 - (-x)"
    assert parse_expression("2^3^2").payload == 512  # right-associative


def test_exponent_must_be_rational_constant():
    with pytest.raises(ParseError) as err:
        parse_expression("x^y")
    assert "exponent" in str(err.value)
    assert parse_expression("x^-2").payload == Fraction(-2)
    assert parse_expression("x^(1/2)").payload == Fraction(1, 2)


def test_decimals_become_exact_rationals():
    assert parse_expression("2.5").payload == Fraction(5, 2)
    assert parse_expression("0.125").payload == Fraction(1, 8)


def test_rational_literals_fold():
    e = parse_expression("3/5")
    assert e.kind == K_CONST and e.payload == Fraction(3, 5)


def test_trailing_garbage():
    with pytest.raises(ParseError):
        parse_expression("x + 1)")
    with pytest.raises(ParseError):
        parse_expression("(x + 1")


@st.composite
def expr_text(draw, depth=0):
    if depth > 3 or draw(st.booleans()):
        return draw(st.sampled_from(["x", "y", "2", "3/7", "0.5"]))
    op = draw(st.sampled_from(["+", "-", "*", "/", "^", "exp", "ln", "neg"]))
    a = draw(expr_text(depth=depth + 1))
    if op == "exp":
        return f"exp({a})"
    if op == "ln":
        return f"ln({a})"
    if op == "neg":
        return f"-({a})"
    if op == "^":
        return f"({a})^{draw(st.sampled_from(['2', '3', '(1/2)', '(-1)']))}"
    b = draw(expr_text(depth=depth + 1))
    return f"({a}) {op} ({b})"


@settings(max_examples=150, deadline=None)
@given(expr_text())
def test_round_trip_is_stable(text):
    e = parse_expression(text)
    printed = to_string(e)
    assert parse_expression(printed) == e
