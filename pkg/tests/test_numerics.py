import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import poly_integral
from stefbound.numerics import (
    Affine, Clamped, FunctionSpec, GridFunction, GridSpec, HypothesisViolation,
    Interval, Product, RunningIntegral, ToleranceNotAchieved, integrate,
    refine_until, rs_integrate, sample,
)

UNIT = Interval(0.0, 1.0)


def fx(source, iv=UNIT, derivative=None):
    return FunctionSpec.from_expr(source, iv, derivative)


def test_interval_validation():
    assert Interval(2, 5).length == 3
    for a, b in ((1, 1), (2, 1), (0, math.inf), (math.nan, 1)):
        with pytest.raises(ValueError):
            Interval(a, b)


@pytest.mark.parametrize(
    "source, iv, n, expected",
    [("t", UNIT, 4, [0, .25, .5, .75, 1]),
     ("2", Interval(-3, 7), 2, [2, 2, 2]),
     ("t^2", UNIT, 2, [0, .25, 1])],
)
def test_sample(source, iv, n, expected):
    grid = sample(fx(source, iv), n)
    assert grid.n == n
    assert list(grid.values) == expected
    assert not grid.values.flags.writeable


def test_integrate_examples():
    assert integrate(fx("t^2"), UNIT, 2) == pytest.approx(1 / 3, abs=1e-15)
    assert integrate(fx("(1 - t)*t"), UNIT, 64) == pytest.approx(1 / 6, abs=1e-15)
    assert integrate(fx("1 - t"), (0.0, 0.5), 64) == pytest.approx(3 / 8, abs=1e-15)
    assert integrate(fx("t"), (0.3, 0.3), 2) == 0.0


def test_integrate_rejects_odd_n():
    with pytest.raises(ValueError):
        integrate(fx("t"), UNIT, 3)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(-50, 50), min_size=4, max_size=4))
def test_simpson_exact_on_cubics(coeffs):
    source = " + ".join(f"({c})*t^{k}" for k, c in enumerate(coeffs))
    exact = float(poly_integral(coeffs, 0, 1))
    assert abs(integrate(fx(source), UNIT, 2) - exact) <= 1e-12


def test_rs_examples():
    assert rs_integrate(fx("t"), fx("t^2"), UNIT, 64) == pytest.approx(2 / 3, abs=1e-14)
    assert rs_integrate(fx("exp(t)"), fx("3"), UNIT, 64) == 0.0
    assert rs_integrate(fx("1"), fx("t"), UNIT, 2) == pytest.approx(1.0, abs=1e-15)


def test_rs_against_grid_integrator_uses_midpoint_sums():
    grid = GridSpec(GridFunction(UNIT, np.array([0.0, 1.0, 0.0])))
    assert grid.derivative() is None
    # p = t: exact value is int_0^.5 2t dt - int_.5^1 2t dt = 1/4 - 3/4
    assert rs_integrate(fx("t"), grid, UNIT, 8) == pytest.approx(-0.5, abs=1e-14)


@pytest.mark.parametrize("a_coef, b_coef", [(1.0, 0.0), (2.5, -1.25), (-3.0, 0.5)])
def test_integrate_is_linear(a_coef, b_coef):
    f, g = fx("exp(-t)*sin(3*t)"), fx("sqrt(1 + t)")
    combo = Affine(f, a_coef)
    lhs = integrate(Product(Affine(fx("1"), 1.0, 0.0), fx(f"{a_coef}*exp(-t)*sin(3*t) + {b_coef}*sqrt(1 + t)")), UNIT, 256)
    rhs = a_coef * integrate(f, UNIT, 256) + b_coef * integrate(g, UNIT, 256)
    assert lhs == pytest.approx(rhs, abs=1e-9)
    assert integrate(combo, UNIT, 256) == pytest.approx(a_coef * integrate(f, UNIT, 256), abs=1e-12)


def test_integrate_is_additive():
    f = fx("cos(4*t) + t^5", Interval(-1, 2))
    whole = integrate(f, (-1, 2), 2048)
    parts = integrate(f, (-1, 0.37), 2048) + integrate(f, (0.37, 2), 2048)
    assert whole == pytest.approx(parts, abs=1e-10)


SMOOTH_PAIRS = [("exp(-t)", "sin(pi*t)"), ("t^3 - t", "cos(2*t)"), ("log(2 + t)", "t^2"),
                ("1/(1 + t^2)", "exp(t)"), ("sin(5*t)", "sqrt(1 + t)")]


@pytest.mark.parametrize("p_src, f_src", SMOOTH_PAIRS)
def test_rs_integration_by_parts(p_src, f_src):
    iv = Interval(-0.5, 1.5)
    p, f = fx(p_src, iv), fx(f_src, iv)
    lhs = rs_integrate(p, f, iv, 4096) + rs_integrate(f, p, iv, 4096)
    rhs = p(1.5) * f(1.5) - p(-0.5) * f(-0.5)
    assert abs(lhs - rhs) <= 1e-6


def test_grid_integration_is_exact_for_piecewise_linear():
    values = np.array([0.0, 2.0, -1.0, 3.0])
    grid = GridSpec(GridFunction(Interval(0, 3), values))
    # oracle: trapezoid areas by hand on unit cells
    assert integrate(grid, (0, 3), 2) == pytest.approx(1 + 0.5 + 1, abs=1e-15)
    # sub-interval cutting through cells: int_0.5^2.5
    assert integrate(grid, (0.5, 2.5), 2) == pytest.approx(0.75 + 0.5 + 0.0, abs=1e-15)
    # squared: (u^2 + uv + v^2)/3 per unit cell, cellwise Simpson is exact
    assert integrate(Product(grid, grid), (0, 3), 2) == pytest.approx(4 / 3 + 3 / 3 + 7 / 3, abs=1e-13)


def test_running_integral_matches_antiderivative():
    iv = Interval(0.0, 2.0)
    run = RunningIntegral(fx("cos(t)", iv), anchor=0.0)
    x = np.array([1.7, 0.0, 0.3, 2.0, 1.1])
    np.testing.assert_allclose(run(x), np.sin(x), atol=1e-10)
    assert run.derivative() is not None
    assert run.derivative()(0.5) == pytest.approx(math.cos(0.5))
    down = RunningIntegral(fx("1", iv), anchor=2.0, sign=-1.0)
    assert down(0.5) == pytest.approx(1.5, abs=1e-14)


def test_clamped_weight_checks_hypothesis():
    ok = Clamped(fx("t + 1e-10"), 0.0, 1.0, 1e-9)
    assert ok(1.0) == 1.0
    with pytest.raises(HypothesisViolation, match="t="):
        Clamped(fx("2*t"), 0.0, 1.0, 1e-9)(np.linspace(0, 1, 5))


def test_declared_derivative_is_validated():
    f = fx("t^3", derivative="3*t^2")
    assert f.derivative()(2.0) == pytest.approx(12.0)
    with pytest.raises(ValueError, match="derivative"):
        fx("t^3", derivative="2*t^2")


def test_abs_expression_has_no_derivative():
    assert fx("abs(t - 0.5)").derivative() is None
    declared = fx("abs(t - 2)", derivative="-1")
    assert declared.derivative()(0.25) == -1.0


def test_reflect():
    iv = Interval(1.0, 3.0)
    f = fx("t^2", iv)
    r = f.reflect()
    assert r(1.0) == f(3.0) and r(2.5) == pytest.approx(f(1.5))
    assert r.derivative()(1.0) == pytest.approx(-6.0)
    grid = GridSpec(GridFunction(iv, np.array([1.0, 2.0, 4.0])))
    assert list(grid.reflect().grid.values) == [4.0, 2.0, 1.0]


def test_refine_until_smooth_converges():
    f = fx("exp(t)*cos(t)")
    exact = (math.exp(1) * (math.cos(1) + math.sin(1)) - 1) / 2
    res = refine_until(lambda n: integrate(f, UNIT, n), tol=1e-10)
    assert res.n < 2 ** 16
    assert res.achieved_tol <= 1e-10
    assert res.value == pytest.approx(exact, abs=1e-11)


def test_refine_until_cubic_exact_at_first_doubling():
    f = fx("4*t^3 - t + 2")
    res = refine_until(lambda n: integrate(f, UNIT, n), tol=1e-12)
    assert res.achieved_tol <= 4e-16
    assert res.n == 128


def test_refine_until_unreachable_tolerance():
    with pytest.raises(ToleranceNotAchieved) as info:
        refine_until(lambda n: integrate(fx("exp(t)"), UNIT, n), tol=1e-300, n_max=1024)
    assert info.value.n == 1024
    assert info.value.value == pytest.approx(math.e - 1, abs=1e-12)
