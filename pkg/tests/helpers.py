"""Test-only generators and oracles, independent of the package internals."""

import random
from fractions import Fraction

from stefbound.expr import BinOp, Call, Const, Neg, Num, Var

SMOOTH_FUNCS = ("sin", "cos", "exp")


def random_ast(rng: random.Random, depth: int = 3, differentiable: bool = True):
    """Random expression that stays finite on [-1, 1]; ``log``/``sqrt`` get positive arguments."""
    if depth == 0 or rng.random() < 0.25:
        roll = rng.random()
        if roll < 0.5:
            return Var()
        if roll < 0.6:
            return Const(rng.choice(("pi", "e")))
        return Num(round(rng.uniform(0.1, 3.0), 3))
    kind = rng.choice(("neg", "add", "sub", "mul", "div", "pow", "call", "call"))
    if kind == "neg":
        return Neg(random_ast(rng, depth - 1, differentiable))
    if kind in ("add", "sub", "mul"):
        op = {"add": "+", "sub": "-", "mul": "*"}[kind]
        return BinOp(op, random_ast(rng, depth - 1, differentiable), random_ast(rng, depth - 1, differentiable))
    if kind == "div":
        # denominator bounded away from zero
        den = BinOp("+", Num(2.5), Call("sin", random_ast(rng, depth - 1, differentiable)))
        return BinOp("/", random_ast(rng, depth - 1, differentiable), den)
    if kind == "pow":
        return BinOp("^", Call("cos", random_ast(rng, depth - 1, differentiable)), Num(float(rng.randint(1, 3))))
    funcs = SMOOTH_FUNCS + ("log", "sqrt") + (() if differentiable else ("abs",))
    name = rng.choice(funcs)
    inner = random_ast(rng, depth - 1, differentiable)
    if name in ("log", "sqrt"):
        inner = BinOp("+", Num(1.5), Call("sin", inner))
    if name == "exp":
        inner = Call("sin", inner)
    return Call(name, inner)


def poly_integral(coeffs, lo, hi):
    """Exact integral of sum c_k t^k over [lo, hi] in rationals."""
    lo, hi = Fraction(lo), Fraction(hi)
    total = Fraction(0)
    for k, c in enumerate(coeffs):
        c = Fraction(c)
        total += c * (hi ** (k + 1) - lo ** (k + 1)) / (k + 1)
    return total
