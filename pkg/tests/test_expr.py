import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import random_ast
from stefbound.expr import (
    BinOp, Call, DomainError, LexError, Neg, NotDifferentiableError, Num,
    ParseError, UnknownIdentifierError, Var, compile_expr, differentiate,
    evaluate, parse, to_string,
)


@pytest.mark.parametrize(
    "source, t, expected",
    [
        ("1 - t", 0.25, 0.75),
        ("2 + 3*t^2", 2.0, 14.0),
        ("sin(pi*t)", 0.5, 1.0),
        ("t^2", 3.0, 9.0),
        ("abs(t - 1)", 0.25, 0.75),
        ("exp(0)", 123.0, 1.0),
        ("-t^2", 3.0, -9.0),
        ("2^3^2", 0.0, 512.0),
        ("8/4/2", 0.0, 1.0),
        ("1 - 2 - 3", 0.0, -4.0),
        ("2^-1", 0.0, 0.5),
        ("--t", 4.0, 4.0),
        ("e", 0.0, math.e),
        ("sqrt(t)*log(t)", math.e ** 2, 2.0 * math.e),
        ("1.5e1 + .5", 0.0, 15.5),
    ],
)
def test_parse_and_evaluate(source, t, expected):
    assert evaluate(parse(source), t) == pytest.approx(expected, rel=1e-15, abs=1e-15)


def test_precedence_shapes():
    assert parse("-t^2") == Neg(BinOp("^", Var(), Num(2.0)))
    assert parse("2^3^2") == BinOp("^", Num(2.0), BinOp("^", Num(3.0), Num(2.0)))
    assert parse("1 + 2*t") == BinOp("+", Num(1.0), BinOp("*", Num(2.0), Var()))


@pytest.mark.parametrize(
    "source, error, position",
    [
        ("2 $ t", LexError, 3),
        ("(1 + t", ParseError, 7),
        ("1 +", ParseError, 4),
        ("t)", ParseError, 2),
        ("1 2", ParseError, 3),
        ("foo(t)", UnknownIdentifierError, 1),
        ("x + 1", UnknownIdentifierError, 1),
        ("t^t", ParseError, 2),
        ("sin t", ParseError, 5),
        ("", ParseError, 1),
    ],
)
def test_parse_errors_report_positions(source, error, position):
    with pytest.raises(error) as info:
        parse(source)
    assert info.value.position == position
    assert f"position {position}" in str(info.value)


@pytest.mark.parametrize(
    "source, t",
    [("log(t)", 0.0), ("log(t - 1)", 0.5), ("sqrt(t)", -1.0), ("1/t", 0.0),
     ("t^0.5", -2.0), ("t^-1", 0.0), ("exp(t)", 1000.0)],
)
def test_domain_errors_are_raised_not_nan(source, t):
    with pytest.raises(DomainError):
        evaluate(parse(source), t)


def test_domain_error_in_vector_names_node():
    with pytest.raises(DomainError, match="t=-0.5"):
        evaluate(parse("log(t)"), np.array([1.0, 2.0, -0.5, 3.0]))


def test_vector_and_scalar_agree():
    ast = parse("sin(3*t) + t^3/(2 + cos(t))")
    x = np.linspace(-2, 2, 101)
    vec = evaluate(ast, x)
    assert vec.shape == x.shape
    assert [evaluate(ast, v) for v in x] == pytest.approx(list(vec), abs=0, rel=1e-15)
    assert evaluate(parse("3"), x).shape == x.shape


@pytest.mark.parametrize(
    "source, derivative, t",
    [("t^2", "2*t", 1.7), ("sin(t)", "cos(t)", 0.3), ("1 - t", "-1", 5.0),
     ("exp(2*t)", "2*exp(2*t)", 0.4), ("log(t)", "1/t", 2.5),
     ("sqrt(t)", "0.5/sqrt(t)", 3.0), ("1/t", "-1/t^2", 1.5), ("t^0.5", "0.5*t^-0.5", 2.0)],
)
def test_differentiate_known_rules(source, derivative, t):
    got = evaluate(differentiate(parse(source)), t)
    assert got == pytest.approx(evaluate(parse(derivative), t), rel=1e-14)


def test_differentiate_simple_trees():
    assert differentiate(parse("t^2")) == BinOp("*", Num(2.0), Var())
    assert differentiate(parse("sin(t)")) == Call("cos", Var())
    assert differentiate(parse("1 - t")) == Num(-1.0)


def test_abs_is_not_differentiable():
    with pytest.raises(NotDifferentiableError, match="finite differences"):
        differentiate(parse("abs(t - 1)"))
    # abs inside a constant subtree is harmless
    assert differentiate(parse("abs(-2)*t")) == Call("abs", Neg(Num(2.0)))


def test_symbolic_derivative_matches_central_differences():
    rng = random.Random(7)
    h = 1e-6
    checked = 0
    for _ in range(200):
        ast = random_ast(rng, depth=3)
        d = compile_expr(differentiate(ast))
        f = compile_expr(ast)
        pts = np.array([rng.uniform(-1, 1) for _ in range(10)])
        fd = (f(pts + h) - f(pts - h)) / (2 * h)
        exact = d(pts)
        err = np.abs(exact - fd) / np.maximum(1.0, np.abs(exact))
        assert np.all(err <= 1e-6), to_string(ast)
        checked += 1
    assert checked == 200


CORPUS = [
    "1 - t", "2 + 3*t^2", "sin(pi*t)", "-t^2", "(-t)^2", "2^3^2", "(2^3)^2",
    "t - (1 - t)", "t - 1 - t", "t/(2*t + 1)", "t/2/3", "t/(2/3)", "--t",
    "-(t + 1)", "exp(-t)", "log(1 + t^2)", "sqrt(abs(t))", "abs(t - 1)",
    "cos(t)^2 + sin(t)^2", "e^2*t", "pi*e", "1e-3*t", "2.5e+10 - t", ".5*t",
    "t^-1", "t^(1/3)", "(1 + t)*(1 - t)", "1 + (2 + 3)", "(1 + 2) + 3",
    "1*(2*3)", "(1*2)*3", "-(-(-t))", "sin(cos(exp(t)))", "t*-1", "2 - -t",
    "t^2^0.5", "(t + 1)^-2", "log(exp(t))", "sqrt(t^2 + 1)/(t^2 + 2)",
    "3*t^3 - 2*t^2 + t - 7", "-1", "-(1)", "(((t)))", "abs(-t)*-t",
    "exp(sin(pi*t))^2", "1/(1 + t^2)^0.5", "t - t*t/(1 + t)",
    "cos(2*pi*t) - 1", "e*-e", "sin(t)/cos(t)",
]


@pytest.mark.parametrize("source", CORPUS)
def test_print_parse_round_trip(source):
    ast = parse(source)
    assert parse(to_string(ast)) == ast


def test_corpus_size():
    assert len(CORPUS) == 50


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(-1, 1))
def test_round_trip_and_purity_on_random_trees(seed, t):
    ast = random_ast(random.Random(seed), depth=4, differentiable=False)
    assert parse(to_string(ast)) == ast
    first = evaluate(ast, t)
    assert evaluate(ast, t) == first or (math.isnan(first) and math.isnan(evaluate(ast, t)))


def test_trees_are_immutable_and_hashable():
    ast = parse("t + 1")
    with pytest.raises(AttributeError):
        ast.op = "-"
    assert hash(ast) == hash(parse("t + 1"))
