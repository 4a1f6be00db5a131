"""Grid estimates of the regularity data the bound families consume.

Nothing here is a certified enclosure: variation sums and sampled suprema
approach the true values from below under refinement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _core as kernels
from .numerics import FunctionSpec, GridSpec, _aligned, _uniform, integrate

DENSE_SAMPLES = 8192
MONOTONE_SLACK = 1e-12
DEFAULT_ESTIMATION_N = 4096

DECREASING = "decreasing"
NONDECREASING = "nondecreasing"
CONSTANT = "constant"
NEITHER = "neither"


class DerivativeUnavailable(ValueError):
    pass


@dataclass(frozen=True)
class RegularityProfile:
    total_variation: float
    lipschitz: float
    monotonicity: str
    deriv_norm_inf: float | None
    deriv_norm_1: float | None
    deriv_norm_p: dict[float, float] = field(default_factory=dict)
    estimation_grid_n: int = DEFAULT_ESTIMATION_N
    derivative_source: str = "symbolic"


def _nodes(f: FunctionSpec, n: int) -> np.ndarray:
    iv = f.interval
    return _aligned(iv.a, iv.b, n, f.breakpoints)


def _dense(f: FunctionSpec, n: int) -> np.ndarray:
    iv = f.interval
    return np.union1d(_uniform(iv.a, iv.b, DENSE_SAMPLES), _nodes(f, n))


def total_variation(f: FunctionSpec, n: int = DEFAULT_ESTIMATION_N) -> float:
    """Variation sum over the ``n``-cell grid (plus any breakpoints of ``f``)."""
    if n < 2:
        raise ValueError("total_variation needs n >= 2")
    return kernels.variation(f(_nodes(f, n)))


def lipschitz_estimate(f: FunctionSpec, n: int = DEFAULT_ESTIMATION_N) -> float:
    """Largest slope seen: sup |f'| on a dense sample, or grid difference quotients."""
    if n < 2:
        raise ValueError("lipschitz_estimate needs n >= 2")
    if isinstance(f, GridSpec):
        nodes = _nodes(f, n)
        return kernels.max_slope(nodes, f(nodes))
    d = f.derivative()
    if d is not None:
        return float(np.max(np.abs(d(_dense(f, n)))))
    nodes = _dense(f, n)
    return kernels.max_slope(nodes, f(nodes))


def classify_monotonicity(f: FunctionSpec, n: int = DEFAULT_ESTIMATION_N) -> str:
    if n < 64:
        raise ValueError("classify_monotonicity needs n >= 64")
    inc = np.diff(f(_nodes(f, n)))
    down = bool(np.all(inc <= MONOTONE_SLACK))
    up = bool(np.all(inc >= -MONOTONE_SLACK))
    if down and up:
        return CONSTANT
    if down:
        return DECREASING
    if up:
        return NONDECREASING
    return NEITHER


class _AbsPower(FunctionSpec):
    def __init__(self, base: FunctionSpec, p: float):
        self.base, self.p = base, p
        self.interval = base.interval

    def _values(self, x):
        v = np.abs(self.base._values(x))
        return v if self.p == 1 else v ** self.p

    @property
    def breakpoints(self):
        return self.base.breakpoints


def deriv_norm(f: FunctionSpec, p: float, n: int = DEFAULT_ESTIMATION_N) -> float:
    """``||f'||_p`` on the whole interval; ``p`` is 1, a real > 1, or ``math.inf``."""
    p = float(p)
    if not p >= 1:
        raise ValueError(f"deriv_norm needs p >= 1, got {p}")
    if isinstance(f, GridSpec):
        s = np.abs(f.slopes)
        if math.isinf(p):
            return float(s.max())
        return float(np.sum(f.grid.h * s ** p) ** (1.0 / p))
    d = f.derivative()
    if d is None:
        raise DerivativeUnavailable(
            "no derivative available (abs() without a declared derivative)"
        )
    if math.isinf(p):
        return float(np.max(np.abs(d(_dense(f, n)))))
    m = n + (n % 2)
    return float(integrate(_AbsPower(d, p), f.interval, m) ** (1.0 / p))


def derivative_source(f: FunctionSpec) -> str:
    if isinstance(f, GridSpec):
        return "grid"
    if getattr(f, "declared", None) is not None:
        return "declared"
    return "symbolic" if f.derivative() is not None else "unavailable"


def profile(f: FunctionSpec, ps=(2.0,), n: int = DEFAULT_ESTIMATION_N) -> RegularityProfile:
    """All regularity estimates of ``f`` at grid resolution ``n``."""
    source = derivative_source(f)
    if source == "unavailable":
        d_inf = d_1 = None
        d_p = {}
    else:
        d_inf = deriv_norm(f, math.inf, n)
        d_1 = deriv_norm(f, 1.0, n)
        d_p = {float(p): deriv_norm(f, p, n) for p in ps}
    return RegularityProfile(
        total_variation=total_variation(f, n),
        lipschitz=lipschitz_estimate(f, n),
        monotonicity=classify_monotonicity(f, max(n, 64)),
        deriv_norm_inf=d_inf,
        deriv_norm_1=d_1,
        deriv_norm_p=d_p,
        estimation_grid_n=n,
        derivative_source=source,
    )
