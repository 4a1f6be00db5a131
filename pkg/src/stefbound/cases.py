"""Seeded random (f, g) pairs for the property suites.

Each case is a pure function of ``(seed, index, family)``: the generator
state is derived from ``[seed, index]`` through numpy's ``SeedSequence`` and
``PCG64``, both of which are platform independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial

from .expr import BinOp, Call, ExprAst, Num, Var
from .numerics import FunctionSpec, GridFunction, GridSpec, Interval

FAMILIES = (
    "decreasing-smooth",
    "nondecreasing-smooth",
    "lipschitz-piecewise-linear",
    "bv-step-mix",
    "admissible-g",
)
MIXED = "mixed"


@dataclass(frozen=True)
class CaseGenerator:
    seed: int
    family: str = MIXED
    interval: Interval | None = None  # None: a fresh random interval per case

    def __post_init__(self):
        if self.family not in FAMILIES and self.family != MIXED:
            raise ValueError(f"unknown family {self.family!r}; choose from {FAMILIES + (MIXED,)}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def family_of(self, index: int) -> str:
        return FAMILIES[index % len(FAMILIES)] if self.family == MIXED else self.family

    def rng(self, index: int) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence([self.seed, index])))


def _unit_variable(iv: Interval) -> ExprAst:
    """(t - a) / (b - a), which runs over [0, 1]."""
    shifted = Var() if iv.a == 0 else BinOp("-", Var(), Num(iv.a))
    return shifted if iv.length == 1 else BinOp("/", shifted, Num(iv.length))


def _horner(coef, u: ExprAst) -> ExprAst:
    coef = [float(c) for c in coef]
    node: ExprAst = Num(coef[-1])
    for c in reversed(coef[:-1]):
        node = BinOp("+", Num(c), BinOp("*", u, node))
    return node


def _monotone_poly(rng: np.random.Generator, length: float, sign: float) -> Polynomial:
    # f = C + sign * L * int_0^u w with w = c + q^2 >= 0
    q = Polynomial(rng.uniform(-1.5, 1.5, size=int(rng.integers(1, 4))))
    w = q * q + rng.uniform(0.0, 0.5)
    return Polynomial([rng.uniform(-1.0, 1.0)]) + sign * length * w.integ()


def _weight(rng: np.random.Generator, iv: Interval) -> FunctionSpec:
    roll = rng.uniform()
    if roll < 0.04:
        return FunctionSpec.from_expr(Num(0.0), iv)
    if roll < 0.08:
        return FunctionSpec.from_expr(Num(1.0), iv)
    degree = 0 if roll < 0.15 else int(rng.integers(1, 4))
    inner = _horner(rng.uniform(-2.0, 2.0, size=degree + 1), _unit_variable(iv))
    return FunctionSpec.from_expr(BinOp("^", Call("sin", inner), Num(2.0)), iv)


def _random_interval(rng: np.random.Generator) -> Interval:
    a = round(float(rng.uniform(-2.0, 2.0)), 3)
    return Interval(a, a + round(float(rng.uniform(0.5, 3.0)), 3))


def generate_case(gen: CaseGenerator, index: int) -> tuple[FunctionSpec, FunctionSpec]:
    """Deterministic ``(f, g)`` for ``(gen.seed, index)``; g always satisfies 0 <= g <= 1."""
    if index < 0:
        raise ValueError("index must be non-negative")
    rng = gen.rng(index)
    family = gen.family_of(index)
    iv = gen.interval or _random_interval(rng)
    u = _unit_variable(iv)

    if family in ("decreasing-smooth", "nondecreasing-smooth"):
        sign = -1.0 if family == "decreasing-smooth" else 1.0
        f = FunctionSpec.from_expr(_horner(_monotone_poly(rng, iv.length, sign).coef, u), iv)
    elif family == "admissible-g":
        f = FunctionSpec.from_expr(_horner(rng.uniform(-2.0, 2.0, size=int(rng.integers(1, 6))), u), iv)
    elif family == "lipschitz-piecewise-linear":
        cells = int(rng.integers(2, 11))
        slopes = rng.uniform(-3.0, 3.0, size=cells)
        values = rng.uniform(-1.0, 1.0) + np.concatenate([[0.0], np.cumsum(slopes * iv.length / cells)])
        f = GridSpec(GridFunction(iv, values))
    else:  # bv-step-mix
        n = 256
        x = np.linspace(0.0, 1.0, n + 1)
        values = 0.5 * np.sin(2 * math.pi * rng.uniform(0.5, 3.0) * x + rng.uniform(0, 2 * math.pi))
        for node in rng.integers(1, n, size=int(rng.integers(1, 5))):
            values = values + rng.uniform(-1.0, 1.0) * (np.arange(n + 1) >= node)
        f = GridSpec(GridFunction(iv, values))
    return f, _weight(rng, iv)
