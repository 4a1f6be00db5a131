"""Function carriers, quadrature and Riemann-Stieltjes sums.

Every definite integral builds a fresh uniform grid on the requested
sub-interval, so endpoints such as ``a + lam`` never have to be interpolated
from a master grid.  Grid-backed functions are piecewise linear between their
nodes; integration aligns cells with those nodes so the piecewise-linear
interpolant itself is integrated without discretisation error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence, Union

import numpy as np

from . import _core as kernels
from .expr import (
    BinOp, ExprAst, Neg, NotDifferentiableError, Num, Var,
    compile_expr, differentiate, is_constant, parse, substitute, to_string,
)

DEFAULT_N0 = 64
DEFAULT_N_MAX = 2 ** 16
DEFAULT_TOL = 1e-8
_EDGE_SLACK = 1e-12


class HypothesisViolation(ValueError):
    """An input violates a standing hypothesis (e.g. 0 <= g <= A)."""


class ToleranceNotAchieved(ArithmeticError):
    """Refinement reached ``n_max`` before the requested tolerance."""

    def __init__(self, value: float, achieved_tol: float, n: int):
        super().__init__(
            f"tolerance not achieved: |I(2n) - I(n)| = {achieved_tol:.3g} at n = {n}"
        )
        self.value = value
        self.achieved_tol = achieved_tol
        self.n = n


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise ValueError(f"interval endpoints must be finite, got [{a}, {b}]")
        if not a < b:
            raise ValueError(f"interval needs a < b, got [{a}, {b}]")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def length(self) -> float:
        return self.b - self.a


SubInterval = Union[Interval, Sequence[float]]


def _span(sub: SubInterval, interval: Interval | None = None) -> tuple[float, float]:
    """Normalise ``sub`` to ``(lo, hi)``; degenerate ``lo == hi`` is allowed."""
    if isinstance(sub, Interval):
        lo, hi = sub.a, sub.b
    else:
        lo, hi = (float(v) for v in sub)
    if not hi >= lo:
        raise ValueError(f"sub-interval needs lo <= hi, got [{lo}, {hi}]")
    if interval is not None:
        slack = _EDGE_SLACK * max(1.0, abs(interval.a), abs(interval.b))
        if lo < interval.a - slack or hi > interval.b + slack:
            raise ValueError(
                f"sub-interval [{lo}, {hi}] outside [{interval.a}, {interval.b}]"
            )
        lo = min(max(lo, interval.a), interval.b)
        hi = min(max(hi, interval.a), interval.b)
    return lo, hi


# --------------------------------------------------------------------------
# Carriers


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples at the uniform nodes ``a + i (b - a) / n``, i = 0..n."""

    interval: Interval
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 1 or values.size < 2:
            raise ValueError("a grid function needs at least two samples")
        if not np.all(np.isfinite(values)):
            raise ValueError("grid values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.size - 1

    @property
    def h(self) -> float:
        return self.interval.length / self.n

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.interval.a, self.interval.b, self.n + 1)

    def __call__(self, x):
        return np.interp(x, self.nodes, self.values)


class FunctionSpec:
    """A real function on an interval: a parsed expression or a sampled grid.

    Use :meth:`from_expr` or :meth:`from_grid`.  The remaining subclasses in
    this module are derived quantities (products, running integrals, clamped
    weights) that the quadrature routines consume the same way.
    """

    interval: Interval

    def _values(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x):
        if np.ndim(x) == 0:
            return float(self._values(np.array([float(x)]))[0])
        return self._values(np.asarray(x, dtype=float))

    @property
    def breakpoints(self) -> np.ndarray:
        """Abscissae where the function may have a kink; empty when smooth."""
        return _EMPTY

    @property
    def is_constant(self) -> bool:
        """True only when the function is known to be constant by construction."""
        return False

    def derivative(self) -> FunctionSpec | None:
        """Exact derivative when one is available, else ``None``."""
        return None

    def reflect(self) -> FunctionSpec:
        """The function ``t -> self(a + b - t)`` on the same interval."""
        raise NotImplementedError

    @staticmethod
    def from_expr(source: str | ExprAst, interval: Interval,
                  derivative: str | ExprAst | None = None) -> "ExprFunction":
        return ExprFunction(interval, source, derivative)

    @staticmethod
    def from_grid(grid: GridFunction) -> "GridSpec":
        return GridSpec(grid)


_EMPTY = np.empty(0)
_VALIDATION_RNG_SEED = 20121230


class ExprFunction(FunctionSpec):
    def __init__(self, interval: Interval, source: str | ExprAst,
                 derivative: str | ExprAst | None = None, *, validate: bool = True):
        self.interval = interval
        self.ast = parse(source) if isinstance(source, str) else source
        self.declared = parse(derivative) if isinstance(derivative, str) else derivative
        self._eval = compile_expr(self.ast)
        self._deriv: FunctionSpec | None | bool = False
        if self.declared is not None and validate:
            self._validate_declared()

    def __repr__(self):
        return f"ExprFunction({to_string(self.ast)!r}, [{self.interval.a}, {self.interval.b}])"

    @property
    def source(self) -> str:
        return to_string(self.ast)

    def _values(self, x):
        return self._eval(x)

    @property
    def is_constant(self) -> bool:
        return is_constant(self.ast)

    def _validate_declared(self):
        a, b = self.interval.a, self.interval.b
        h = 1e-6 * max(1.0, abs(a), abs(b), b - a)
        rng = np.random.default_rng(_VALIDATION_RNG_SEED)
        pts = rng.uniform(a + 2 * h, b - 2 * h, size=10)
        fd = (self._eval(pts + h) - self._eval(pts - h)) / (2 * h)
        declared = compile_expr(self.declared)(pts)
        err = np.abs(fd - declared) / np.maximum(1.0, np.abs(declared))
        if np.any(err > 1e-6):
            i = int(np.argmax(err))
            raise ValueError(
                f"declared derivative disagrees with finite differences at t={pts[i]:.6g} "
                f"({declared[i]:.6g} vs {fd[i]:.6g})"
            )

    @property
    def symbolic_derivative(self) -> ExprAst | None:
        if self.declared is not None:
            return self.declared
        try:
            return differentiate(self.ast)
        except NotDifferentiableError:
            return None

    def derivative(self):
        if self._deriv is False:
            d = self.symbolic_derivative
            self._deriv = None if d is None else ExprFunction(self.interval, d, validate=False)
        return self._deriv

    def reflect(self):
        mirror = BinOp("-", Num(self.interval.a + self.interval.b), Var())
        declared = None if self.declared is None else Neg(substitute(self.declared, mirror))
        return ExprFunction(self.interval, substitute(self.ast, mirror), declared, validate=False)


class GridSpec(FunctionSpec):
    def __init__(self, grid: GridFunction):
        self.grid = grid
        self.interval = grid.interval

    def __repr__(self):
        return f"GridSpec(n={self.grid.n}, [{self.interval.a}, {self.interval.b}])"

    def _values(self, x):
        return self.grid(x)

    @property
    def breakpoints(self):
        return self.grid.nodes

    @property
    def is_constant(self) -> bool:
        v = self.grid.values
        return bool(np.all(v == v[0]))

    @property
    def slopes(self) -> np.ndarray:
        """Slopes of the piecewise-linear interpolant on each cell."""
        return np.diff(self.grid.values) / self.grid.h

    def reflect(self):
        return GridSpec(GridFunction(self.interval, self.grid.values[::-1]))


class Product(FunctionSpec):
    def __init__(self, *factors: FunctionSpec):
        self.factors = factors
        self.interval = factors[0].interval

    def _values(self, x):
        out = self.factors[0]._values(x)
        for f in self.factors[1:]:
            out = out * f._values(x)
        return out

    @property
    def breakpoints(self):
        bps = [f.breakpoints for f in self.factors if f.breakpoints.size]
        return np.unique(np.concatenate(bps)) if bps else _EMPTY

    def reflect(self):
        return Product(*(f.reflect() for f in self.factors))


class Affine(FunctionSpec):
    """``offset + scale * base``."""

    def __init__(self, base: FunctionSpec, scale: float, offset: float = 0.0):
        self.base = base
        self.scale = float(scale)
        self.offset = float(offset)
        self.interval = base.interval

    def _values(self, x):
        return self.offset + self.scale * self.base._values(x)

    @property
    def breakpoints(self):
        return self.base.breakpoints

    def derivative(self):
        d = self.base.derivative()
        return None if d is None else Affine(d, self.scale)

    def reflect(self):
        return Affine(self.base.reflect(), self.scale, self.offset)


class Clamped(FunctionSpec):
    """``base`` checked against ``[lo, hi]`` and clipped within ``eps``.

    Samples further than ``eps`` outside the range raise
    :class:`HypothesisViolation` naming the node.
    """

    def __init__(self, base: FunctionSpec, lo: float, hi: float, eps: float):
        self.base = base
        self.lo, self.hi, self.eps = float(lo), float(hi), float(eps)
        self.interval = base.interval

    def _values(self, x):
        v = self.base._values(x)
        bad = (v < self.lo - self.eps) | (v > self.hi + self.eps)
        if np.any(bad):
            i = int(np.flatnonzero(bad)[0])
            raise HypothesisViolation(
                f"g(t={x.ravel()[i]:.17g}) = {v.ravel()[i]:.17g} lies outside "
                f"[{self.lo:g}, {self.hi:g}]"
            )
        return np.clip(v, self.lo, self.hi)

    @property
    def breakpoints(self):
        return self.base.breakpoints

    def reflect(self):
        return Clamped(self.base.reflect(), self.lo, self.hi, self.eps)


class RunningIntegral(FunctionSpec):
    """``x -> sign * integral of base from anchor to x``.

    Evaluation sorts the requested abscissae and accumulates one-panel
    Simpson rules between neighbours, so evaluating on a fine grid costs a
    single pass.
    """

    def __init__(self, base: FunctionSpec, anchor: float, sign: float = 1.0, n_gap: int = 64):
        self.base = base
        self.anchor = float(anchor)
        self.sign = float(sign)
        self.n_gap = n_gap
        self.interval = base.interval

    def _from_anchor(self, pts: np.ndarray) -> np.ndarray:
        # pts ordered by distance from the anchor
        if pts.size == 0:
            return pts
        first = pts[0]
        lead = 0.0
        if first != self.anchor:
            spacing = np.abs(np.diff(pts)).max() if pts.size > 1 else abs(first - self.anchor) / self.n_gap
            n = int(min(DEFAULT_N_MAX, max(2, 2 * math.ceil(abs(first - self.anchor) / (2 * spacing)))))
            lo, hi = sorted((self.anchor, first))
            lead = integrate(self.base, (lo, hi), n)
            if first < self.anchor:
                lead = -lead
        if pts.size == 1:
            return np.array([lead])
        mids = 0.5 * (pts[:-1] + pts[1:])
        vals = self.base._values(np.concatenate([pts, mids]))
        cum = kernels.cumulative_simpson(pts, vals[: pts.size], vals[pts.size:])
        widths = np.abs(np.diff(pts))
        cell = self.interval.length / self.n_gap
        wide = np.flatnonzero(widths > cell)
        if wide.size:
            # sparse abscissae: one panel per gap is too coarse, integrate those gaps properly
            cells = np.diff(cum)
            for i in wide:
                lo, hi = sorted((pts[i], pts[i + 1]))
                part = integrate(self.base, (lo, hi), 2 * math.ceil(widths[i] / cell))
                cells[i] = part if pts[i + 1] > pts[i] else -part
            cum = np.concatenate([[0.0], np.cumsum(cells)])
        return lead + cum

    def _values(self, x):
        flat = x.ravel()
        order = np.argsort(flat, kind="stable")
        xs = flat[order]
        split = np.searchsorted(xs, self.anchor, side="left")
        out_sorted = np.empty_like(xs)
        out_sorted[split:] = self._from_anchor(xs[split:])
        out_sorted[:split] = self._from_anchor(xs[:split][::-1])[::-1]
        out = np.empty_like(flat)
        out[order] = self.sign * out_sorted
        return out.reshape(x.shape)

    @property
    def breakpoints(self):
        return self.base.breakpoints

    def derivative(self):
        return Affine(self.base, self.sign) if self.sign != 1.0 else self.base

    def reflect(self):
        iv = self.interval
        return RunningIntegral(self.base.reflect(), iv.a + iv.b - self.anchor, -self.sign, self.n_gap)


# --------------------------------------------------------------------------
# Sampling and quadrature


def _uniform(lo: float, hi: float, n: int) -> np.ndarray:
    return np.linspace(lo, hi, n + 1)


def _aligned(lo: float, hi: float, n: int, breakpoints: np.ndarray) -> np.ndarray:
    nodes = _uniform(lo, hi, n)
    if breakpoints.size:
        inner = breakpoints[(breakpoints > lo) & (breakpoints < hi)]
        if inner.size:
            nodes = np.unique(np.concatenate([nodes, inner]))
    return nodes


def sample(spec: FunctionSpec, n: int) -> GridFunction:
    """Uniform samples of ``spec`` on its interval (``n`` cells)."""
    if n < 2:
        raise ValueError("sample needs n >= 2")
    iv = spec.interval
    if isinstance(spec, GridSpec) and spec.grid.n == n:
        return spec.grid
    return GridFunction(iv, spec(_uniform(iv.a, iv.b, n)))


def integrate(spec: FunctionSpec, sub: SubInterval, n: int) -> float:
    """Definite integral of ``spec`` over ``sub`` using ``n`` panels.

    Smooth integrands use composite Simpson on a fresh uniform grid.  Grid
    functions use the trapezoid rule on their own nodes (exact for the
    piecewise-linear interpolant); other integrands with breakpoints use one
    Simpson panel per cell of the uniform grid merged with the breakpoints.
    """
    if n < 2 or n % 2:
        raise ValueError(f"integrate needs an even n >= 2, got {n}")
    lo, hi = _span(sub, spec.interval)
    if lo == hi:
        return 0.0
    if isinstance(spec, GridSpec):
        nodes = _aligned(lo, hi, 1, spec.breakpoints)
        return kernels.trapezoid(nodes, spec(nodes))
    bps = spec.breakpoints
    if bps.size and np.any((bps > lo) & (bps < hi)):
        nodes = _aligned(lo, hi, n, bps)
        mids = 0.5 * (nodes[:-1] + nodes[1:])
        vals = spec(np.concatenate([nodes, mids]))
        return kernels.cellwise_simpson(nodes, vals[: nodes.size], vals[nodes.size:])
    return kernels.simpson(spec(_uniform(lo, hi, n)), (hi - lo) / n)


def rs_integrate(p: FunctionSpec, integrator: FunctionSpec, sub: SubInterval, n: int) -> float:
    """Riemann-Stieltjes integral of ``p`` with respect to ``integrator``.

    With an exact derivative available this is ``integrate(p * integrator')``;
    otherwise midpoint-tagged sums over the uniform grid merged with the
    integrator's breakpoints.
    """
    if n < 2:
        raise ValueError(f"rs_integrate needs n >= 2, got {n}")
    lo, hi = _span(sub, integrator.interval)
    if lo == hi:
        return 0.0
    d = integrator.derivative()
    if d is not None:
        return integrate(Product(p, d), (lo, hi), n + (n % 2))
    nodes = _aligned(lo, hi, n, integrator.breakpoints)
    mids = 0.5 * (nodes[:-1] + nodes[1:])
    return kernels.rs_sum(p(mids), integrator(nodes))


class Refinement(NamedTuple):
    value: float
    achieved_tol: float
    n: int


def refine_until(worker: Callable[[int], float], tol: float = DEFAULT_TOL,
                 n0: int = DEFAULT_N0, n_max: int = DEFAULT_N_MAX) -> Refinement:
    """Double ``n`` until successive values of ``worker(n)`` agree within ``tol``.

    Raises :class:`ToleranceNotAchieved` carrying the best value when
    ``n_max`` is reached first.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if n0 < 2 or n_max < 4 * n0:
        raise ValueError("need n0 >= 2 and n_max >= 4 * n0")
    n = n0
    prev = worker(n)
    diff = math.inf
    while 2 * n <= n_max:
        n *= 2
        cur = worker(n)
        diff = abs(cur - prev)
        if diff <= tol:
            return Refinement(cur, diff, n)
        prev = cur
    raise ToleranceNotAchieved(prev, diff, n)


def refined_integral(spec: FunctionSpec, sub: SubInterval, tol: float = DEFAULT_TOL,
                     n0: int = DEFAULT_N0, n_max: int = DEFAULT_N_MAX,
                     scale: float = 1.0) -> Refinement:
    """``scale * integral`` refined by doubling; never raises on slow convergence.

    When the tolerance is missed the best value is returned with its (large)
    achieved tolerance so callers can widen their own slack.
    """
    lo, hi = _span(sub, spec.interval)
    if lo == hi:
        return Refinement(0.0, 0.0, n0)
    if scale == 1.0:
        worker = lambda n: integrate(spec, (lo, hi), n)  # noqa: E731
    else:
        worker = lambda n: scale * integrate(spec, (lo, hi), n)  # noqa: E731
    try:
        return refine_until(worker, tol, n0, n_max)
    except ToleranceNotAchieved as exc:
        return Refinement(exc.value, exc.achieved_tol, exc.n)
