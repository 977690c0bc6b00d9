import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minsurf.expr import (
    EvaluationError,
    Expr,
    ParseError,
    differentiate,
    evaluate,
    parse_expression,
    to_string,
    var,
)


def test_parse_helicoid_R():
    assert evaluate(parse_expression("-i/(2*w^2)", "w"), 1.0) == pytest.approx(-0.5j)


def test_parse_one_minus_w2():
    assert evaluate(parse_expression("(1-w^2)", "w"), 0.0) == 1


def test_graph_mode_atan():
    e = parse_expression("atan(y/x)", ("x", "y"))
    assert evaluate(e, {"x": 1.0, "y": 1.0}) == pytest.approx(math.pi / 4)


@pytest.mark.parametrize("text, at, expected", [
    ("i/(2*w)", 1j, 0.5),
    ("w^2", 1 + 1j, 2j),
    ("exp(w)", 0, 1),
    ("sqrt(w)", -4, 2j),
    ("log(w)", -1, 1j * math.pi),
    ("w^-2", 2, 0.25),
    ("2.5e-1*w", 4, 1),
    ("pi", 0, math.pi),
])
def test_evaluate_examples(text, at, expected):
    assert evaluate(parse_expression(text), at) == pytest.approx(expected, abs=1e-15)


def test_unary_minus_binds_tighter_than_power():
    assert evaluate(parse_expression("-w^2"), 3.0) == 9
    assert evaluate(parse_expression("0-w^2"), 3.0) == -9


def test_whitespace_is_insignificant():
    assert parse_expression(" 1 +\tw * 2 ") == parse_expression("1+w*2")


@pytest.mark.parametrize("text, offset", [
    ("1 + $", 4),
    ("2*(w+1", 6),
    ("w^1.5", 2),
    ("é+q", 0),
    ("w+)", 2),
])
def test_parse_errors_carry_byte_offset(text, offset):
    with pytest.raises(ParseError) as info:
        parse_expression(text)
    assert info.value.offset == offset


def test_unknown_identifier_and_arity():
    with pytest.raises(ParseError, match="unknown identifier"):
        parse_expression("z+1", "w")
    with pytest.raises(ParseError, match="arity"):
        parse_expression("exp(w, 2)")
    with pytest.raises(ValueError):
        parse_expression("1", "i")


def test_evaluation_failures():
    with pytest.raises(EvaluationError, match="division by zero"):
        evaluate(parse_expression("1/w"), 0)
    with pytest.raises(EvaluationError):
        evaluate(parse_expression("log(w)"), 0)
    with pytest.raises(EvaluationError, match="non-finite"):
        evaluate(parse_expression("exp(w)"), 1000)
    with pytest.raises(EvaluationError):
        evaluate(parse_expression("w^-1"), np.array([1.0, 0.0]))


def test_failure_names_the_node():
    e = parse_expression("w + 1/(w-1)")
    with pytest.raises(EvaluationError) as info:
        evaluate(e, 1.0)
    assert to_string(info.value.node) == "(1/(w-1))"


def test_vector_evaluation_keeps_shape():
    pts = np.linspace(1, 2, 7).reshape(7, 1) + 0j
    assert evaluate(parse_expression("3"), pts).shape == (7, 1)
    assert np.allclose(evaluate(parse_expression("w^3"), pts), pts**3)


@pytest.mark.parametrize("text, deriv", [
    ("w^2", "2*w"),
    ("-i/(2*w^2)", "i/w^3"),
    ("exp(2*w)", "2*exp(2*w)"),
    ("tan(w)", "1/cos(w)^2"),
    ("atan(w)", "1/(1+w^2)"),
    ("sqrt(w)", "1/(2*sqrt(w))"),
    ("log(sin(w))", "cos(w)/sin(w)"),
])
def test_derivative_examples(text, deriv):
    d = differentiate(parse_expression(text))
    ref = parse_expression(deriv)
    for p in (0.3 + 0.7j, 1.2 - 0.4j):
        assert evaluate(d, p) == pytest.approx(evaluate(ref, p), rel=1e-14)


def test_partial_derivatives_in_graph_mode():
    phi = parse_expression("atan(y/x)", ("x", "y"))
    at = {"x": 1.0, "y": 2.0}
    assert evaluate(differentiate(phi, "x"), at) == pytest.approx(-2 / 5)
    assert evaluate(differentiate(phi, "y"), at) == pytest.approx(1 / 5)
    with pytest.raises(ValueError):
        differentiate(phi)


CORPUS = [
    "w^2", "-i/(2*w^2)", "1/(2*w^2)", "exp(2*w)", "sin(w)*cos(w)", "tan(w/3)", "sqrt(w+3)",
    "log(w+2)", "atan(w/2)", "(1-w^2)/(1+w^2)", "w^5-3*w", "exp(w)/(w+3)", "i*w^3+2",
    "sin(w^2)", "cos(1/(w+2))", "log(1+w^2/4)", "sqrt(4-w)*w", "(w+i)^-3", "exp(-w^2)", "w*atan(w)",
]


def test_derivative_matches_central_difference_on_corpus():
    rng = np.random.default_rng(7)
    pts = rng.uniform(-0.8, 0.8, 20) + 1j * rng.uniform(-0.8, 0.8, 20)
    for text in CORPUS:
        e = parse_expression(text)
        d = differentiate(e)
        for p in pts:
            h = 1e-5 * (1 + abs(p))
            fd = (evaluate(e, p + h) - evaluate(e, p - h)) / (2 * h)
            exact = evaluate(d, p)
            assert abs(exact - fd) <= 1e-6 * (1 + abs(exact)), (text, p)


def test_print_is_canonical():
    assert to_string(parse_expression("1+w*2")) == "(1+(w*2))"
    assert to_string(parse_expression("-2*w")) == "((-2)*w)"
    assert to_string(parse_expression("(1-2*i)*w")) == "((1-2*i)*w)"
    assert to_string(parse_expression("-w")) == "(-w)"
    assert to_string(parse_expression("0.1")) == "0.10000000000000001"


def _exprs():
    leaves = st.one_of(
        st.just(var("w")),
        st.builds(lambda a, b: Expr("const", value=complex(a, b)),
                  st.floats(-5, 5, allow_subnormal=False), st.floats(-5, 5, allow_subnormal=False)),
    )

    def grow(children):
        return st.one_of(
            st.builds(lambda a, b: a + b, children, children),
            st.builds(lambda a, b: a - b, children, children),
            st.builds(lambda a, b: a * b, children, children),
            st.builds(lambda a, n: a ** n, children, st.integers(0, 3)),
            st.builds(lambda a: Expr("exp", (a,)), children),
            st.builds(lambda a: Expr("sin", (a,)), children),
        )

    return st.recursive(leaves, grow, max_leaves=8)


@settings(max_examples=60, deadline=None)
@given(_exprs())
def test_print_parse_round_trip_is_bitwise(e):
    back = parse_expression(to_string(e))
    rng = np.random.default_rng(0)
    pts = rng.uniform(-1, 1, 100) + 1j * rng.uniform(-1, 1, 100)
    try:
        a = evaluate(e, pts)
    except EvaluationError:
        return
    b = evaluate(back, pts)
    assert np.array_equal(a.view(np.float64), b.view(np.float64))


@settings(max_examples=50, deadline=None)
@given(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False))
def test_derivative_of_derivative_is_an_expr(p):
    d2 = differentiate(differentiate(parse_expression("exp(w)*w^2")))
    assert isinstance(d2, Expr)
    assert evaluate(d2, p) == pytest.approx(cmath.exp(p) * (p * p + 4 * p + 2), rel=1e-12, abs=1e-12)
