import hypothesis
import hypothesis.strategies as st
import numpy as np
import pytest

from finbound.fieldexpr import (FieldDomainError, FieldParseError, constant_field,
                                eval_field, parse_field)


def test_basic_arithmetic():
    assert eval_field(parse_field("1/(1+x^2)"), {"x": 1.0}) == 0.5
    assert eval_field(parse_field("sqrt(x*x+y*y)"), {"x": 3.0, "y": 4.0}) == 5.0
    assert eval_field(parse_field("2"), {"x": 123.0}) == 2.0
    assert eval_field(parse_field("-x"), {"x": -1.0}) == 1.0


def test_precedence_and_associativity():
    assert eval_field(parse_field("2+3*4"), {}) == 14.0
    assert eval_field(parse_field("2*3^2"), {}) == 18.0
    assert eval_field(parse_field("-3^2"), {}) == -9.0      # unary minus below ^
    assert eval_field(parse_field("2^3^2"), {}) == 512.0    # right associative
    assert eval_field(parse_field("8-4-2"), {}) == 2.0      # left associative
    assert eval_field(parse_field("8/4/2"), {}) == 1.0
    assert eval_field(parse_field("min(3, max(1, 2))"), {}) == 2.0
    assert eval_field(parse_field("abs(0-3)"), {}) == 3.0


def test_syntax_error_offset():
    with pytest.raises(FieldParseError) as exc:
        parse_field("1+(")
    assert exc.value.offset == 3
    assert exc.value.expected


def test_unknown_identifier():
    with pytest.raises(FieldParseError, match="unknown identifier"):
        parse_field("1 + z")
    with pytest.raises(FieldParseError):
        parse_field("")


def test_domain_errors():
    with pytest.raises(FieldDomainError):
        eval_field(parse_field("1/(x-1)"), {"x": 1.0})
    with pytest.raises(FieldDomainError):
        eval_field(parse_field("sqrt(x)"), {"x": -2.0})
    with pytest.raises(FieldDomainError):
        eval_field(parse_field("x*y"), {"x": 1.0})   # y missing


def test_evaluation_is_pure():
    expr = parse_field("sin(x)*exp(y) + x^3/7")
    coords = {"x": 0.37, "y": -1.21}
    first = eval_field(expr, coords)
    assert all(eval_field(expr, coords) == first for _ in range(5))


def test_array_evaluation_matches_scalar():
    expr = parse_field("sqrt(x*x + y*y) - min(x, y)")
    xs = np.linspace(0.1, 2.0, 7)
    ys = np.linspace(0.2, 1.0, 7)
    arr = expr.evaluate_array({"x": xs, "y": ys})
    for k in range(len(xs)):
        assert arr[k] == eval_field(expr, {"x": xs[k], "y": ys[k]})


_leaf = st.one_of(
    st.floats(min_value=0.1, max_value=9.0).map(lambda v: f"{v:.3f}"),
    st.sampled_from(["x", "y", "r", "theta"]),
)


@st.composite
def expressions(draw, depth=3):
    if depth == 0:
        return draw(_leaf)
    kind = draw(st.integers(0, 5))
    if kind == 0:
        return draw(_leaf)
    a = draw(expressions(depth=depth - 1))
    b = draw(expressions(depth=depth - 1))
    if kind == 1:
        op = draw(st.sampled_from(["+", "-", "*", "/"]))
        return f"({a} {op} {b})"
    if kind == 2:
        return f"(-{a})"
    if kind == 3:
        fn = draw(st.sampled_from(["sin", "cos", "exp", "abs", "sqrt"]))
        return f"{fn}({a})"
    if kind == 4:
        fn = draw(st.sampled_from(["min", "max"]))
        return f"{fn}({a}, {b})"
    return f"({a} ^ 2)"


@hypothesis.given(expressions())
@hypothesis.settings(max_examples=60, deadline=None)
def test_parse_print_parse_idempotent(text):
    expr = parse_field(text)
    printed = expr.unparse()
    reparsed = parse_field(printed)
    assert reparsed.ast == expr.ast
    assert parse_field(reparsed.unparse()).ast == expr.ast


def test_constant_field_roundtrip():
    c = constant_field(2.5)
    assert eval_field(c, {}) == 2.5
    assert parse_field(c.unparse()).ast == c.ast
