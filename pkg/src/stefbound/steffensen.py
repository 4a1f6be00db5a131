"""Steffensen gaps, the integration-by-parts representations and every bound family.

Notation used throughout: ``lam`` is the mass of the weight ``g / A``,
``m = a + lam`` and ``r = b - lam`` split the interval, ``rest = b - a - lam``.
The left gap is ``int_a^m f - int f g / A`` and the right gap is
``int f g / A - int_r^b f``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

from . import regularity
from .expr import DomainError
from .numerics import (
    DEFAULT_N0, DEFAULT_N_MAX, DEFAULT_TOL, Affine, Clamped, FunctionSpec,
    HypothesisViolation, Product, RunningIntegral, integrate, refined_integral,
    rs_integrate,
)
from .regularity import (
    CONSTANT, DECREASING, NONDECREASING, DerivativeUnavailable, RegularityProfile,
)

G_CLAMP_EPS = 1e-9
LAMBDA_TOL = 1e-10
REPORT_TOL_FLOOR = 1e-7
RESIDUAL_N = 4096

LEFT, RIGHT = "left", "right"

FAMILIES = (
    "bv_tight", "bv_coarse", "decreasing", "lipschitz", "lipschitz_remark",
    "monotone", "monotone_remark", "ac_inf", "ac_p", "ac_1",
)


@dataclass(frozen=True)
class HolderPair:
    p: float
    q: float

    def __post_init__(self):
        if not (self.p > 1 and self.q > 1):
            raise ValueError(f"Holder exponents must exceed 1, got p={self.p}, q={self.q}")
        if abs(1 / self.p + 1 / self.q - 1) > 1e-12:
            raise ValueError(f"p={self.p} and q={self.q} are not conjugate")

    @classmethod
    def from_p(cls, p: float) -> "HolderPair":
        p = float(p)
        if not (p > 1 and math.isfinite(p)):
            raise ValueError(f"the L_p branch needs 1 < p < inf, got {p}")
        return cls(p, p / (p - 1.0))


@dataclass(frozen=True)
class ReportConfig:
    tol: float = DEFAULT_TOL
    n0: int = DEFAULT_N0
    n_max: int = DEFAULT_N_MAX
    p: float = 2.0
    A: float = 1.0
    estimation_n: int = regularity.DEFAULT_ESTIMATION_N
    residual_n: int = RESIDUAL_N


@dataclass(frozen=True)
class BoundEntry:
    family: str
    side: str
    bound: float
    gap: float
    holds: bool
    slack: float
    hypotheses_met: bool


class Sandwich(NamedTuple):
    lower: float
    mid: float
    upper: float


@dataclass(frozen=True)
class Setup:
    """Everything computed once per (f, g, A) before any bound is evaluated."""

    f: FunctionSpec
    g: FunctionSpec
    A: float
    weight: FunctionSpec
    lam: float
    left_integral: float   # int_a^m f
    weighted_integral: float  # int f g / A
    right_integral: float  # int_r^b f
    tail_mass: float  # int_m^b g / A
    head_mass: float  # int_a^r g / A
    achieved_tol: float
    n_final: int

    @property
    def a(self) -> float:
        return self.f.interval.a

    @property
    def b(self) -> float:
        return self.f.interval.b

    @property
    def rest(self) -> float:
        return max(0.0, self.b - self.a - self.lam)

    @property
    def left_gap(self) -> float:
        return self.left_integral - self.weighted_integral

    @property
    def right_gap(self) -> float:
        return self.weighted_integral - self.right_integral

    @property
    def tol_report(self) -> float:
        return max(REPORT_TOL_FLOOR, 10.0 * self.achieved_tol)

    def gap(self, side: str) -> float:
        return self.left_gap if side == LEFT else self.right_gap


@dataclass(frozen=True)
class BoundReport:
    interval: tuple[float, float]
    lam: float
    hayashi_A: float
    left_gap: float
    right_gap: float
    regularity: RegularityProfile
    entries: list[BoundEntry]
    residual_left: float | None
    residual_right: float | None
    n_final: int
    achieved_tol: float
    tol_report: float
    sandwich: Sandwich
    sandwich_hypotheses_met: bool
    skipped: list[tuple[str, str]] = field(default_factory=list)

    def entry(self, family: str, side: str = LEFT) -> BoundEntry:
        for e in self.entries:
            if e.family == family and e.side == side:
                return e
        raise KeyError((family, side))

    def violations(self) -> list[BoundEntry]:
        """Entries whose hypotheses hold but whose bound fails beyond tolerance."""
        return [e for e in self.entries if e.hypotheses_met and not e.holds]


# --------------------------------------------------------------------------
# lambda and the shared setup


def admissible_weight(g: FunctionSpec, A: float = 1.0) -> FunctionSpec:
    """``g / A`` after checking ``0 <= g <= A`` (clamping within ``G_CLAMP_EPS``)."""
    if not (A > 0 and math.isfinite(A)):
        raise ValueError(f"the scale A must be positive and finite, got {A}")
    clamped = Clamped(g, 0.0, A, G_CLAMP_EPS)
    return clamped if A == 1.0 else Affine(clamped, 1.0 / A)


def _snap_lambda(lam: float, length: float) -> float:
    lam = min(max(lam, 0.0), length)
    if lam < 1e-13 * length:
        return 0.0
    if length - lam < 1e-13 * length:
        return length
    return lam


def compute_lambda(g: FunctionSpec, A: float = 1.0, *, n0: int = DEFAULT_N0,
                   n_max: int = DEFAULT_N_MAX) -> float:
    """``(1/A) int_a^b g`` refined to ``LAMBDA_TOL`` and clamped to ``[0, b - a]``."""
    ref = refined_integral(admissible_weight(g, A), g.interval, LAMBDA_TOL, n0, n_max)
    return _snap_lambda(ref.value, g.interval.length)


def prepare(f: FunctionSpec, g: FunctionSpec, A: float = 1.0, *, tol: float = DEFAULT_TOL,
            n0: int = DEFAULT_N0, n_max: int = DEFAULT_N_MAX) -> Setup:
    if f.interval != g.interval:
        raise ValueError("f and g must live on the same interval")
    iv = f.interval
    a, b = iv.a, iv.b
    weight = admissible_weight(g, A)
    lam_ref = refined_integral(weight, iv, LAMBDA_TOL, n0, n_max)
    lam = _snap_lambda(lam_ref.value, iv.length)
    m = b if lam == iv.length else a + lam
    r = a if lam == iv.length else b - lam
    m, r = min(m, b), max(r, a)
    refs = [
        lam_ref,
        refined_integral(f, (a, m), tol, n0, n_max),
        refined_integral(Product(f, weight), iv, tol, n0, n_max),
        refined_integral(f, (r, b), tol, n0, n_max),
        refined_integral(weight, (m, b), tol, n0, n_max),
        refined_integral(weight, (a, r), tol, n0, n_max),
    ]
    return Setup(
        f=f, g=g, A=float(A), weight=weight, lam=lam,
        left_integral=refs[1].value,
        weighted_integral=refs[2].value,
        right_integral=refs[3].value,
        tail_mass=refs[4].value,
        head_mass=refs[5].value,
        achieved_tol=max(ref.achieved_tol for ref in refs),
        n_final=max(ref.n for ref in refs),
    )


def sandwich(f: FunctionSpec, g: FunctionSpec, A: float = 1.0, **quad) -> Sandwich:
    """``(int_r^b f, int f g / A, int_a^m f)``; ordered when f is decreasing."""
    s = quad.pop("setup", None) or prepare(f, g, A, **quad)
    return Sandwich(s.right_integral, s.weighted_integral, s.left_integral)


# --------------------------------------------------------------------------
# representation residuals


def _residuals(f: FunctionSpec, g: FunctionSpec, A: float, n: int) -> tuple[float, float]:
    if n < 64 or n % 2:
        raise ValueError(f"identity residuals need an even n >= 64, got {n}")
    if f.interval != g.interval:
        raise ValueError("f and g must live on the same interval")
    if not (A > 0 and math.isfinite(A)):
        raise ValueError(f"the scale A must be positive and finite, got {A}")
    iv = f.interval
    a, b = iv.a, iv.b
    gc = Clamped(g, 0.0, A, G_CLAMP_EPS)
    inv = 1.0 / A
    lam = _snap_lambda(inv * integrate(gc, iv, n), iv.length)
    if f.is_constant:
        # df = 0 and both left-hand sides are c*lam - c*lam
        return 0.0, 0.0
    m, r = min(a + lam, b), max(b - lam, a)
    fg = inv * integrate(Product(f, gc), iv, n)
    deficit = Affine(gc, -1.0, A)  # A - g

    lhs_left = integrate(f, (a, m), n) - fg
    rhs_left = (
        -inv * rs_integrate(RunningIntegral(deficit, a), f, (a, m), n)
        - inv * rs_integrate(RunningIntegral(gc, b, -1.0), f, (m, b), n)
    )
    lhs_right = fg - integrate(f, (r, b), n)
    rhs_right = (
        -inv * rs_integrate(RunningIntegral(gc, a), f, (a, r), n)
        - inv * rs_integrate(RunningIntegral(deficit, b, -1.0), f, (r, b), n)
    )
    return abs(lhs_left - rhs_left), abs(lhs_right - rhs_right)


def identity_residual_left(f: FunctionSpec, g: FunctionSpec, n: int = RESIDUAL_N) -> float:
    """|LHS - RHS| of the left representation, all quadratures at ``n`` panels."""
    return _residuals(f, g, 1.0, n)[0]


def identity_residual_right(f: FunctionSpec, g: FunctionSpec, n: int = RESIDUAL_N) -> float:
    return _residuals(f, g, 1.0, n)[1]


def hayashi_residuals(f: FunctionSpec, g: FunctionSpec, A: float,
                      n: int = RESIDUAL_N) -> tuple[float, float]:
    """Residuals of the A-scaled representations (``0 <= g <= A``)."""
    return _residuals(f, g, float(A), n)


# --------------------------------------------------------------------------
# bound families


def _entry(setup: Setup, family: str, side: str, bound: float, met: bool,
           *, gap: float | None = None, one_sided: bool = False) -> BoundEntry:
    if gap is None:
        gap = setup.gap(side)
    tol = setup.tol_report
    slack = bound - abs(gap)
    holds = slack >= -tol and (not one_sided or gap >= -tol)
    return BoundEntry(family, side, float(bound), float(gap), bool(holds), float(slack), bool(met))


def bv_bounds(setup: Setup, profile: RegularityProfile) -> list[BoundEntry]:
    var = profile.total_variation
    met = math.isfinite(var)
    coarse = setup.rest * var
    return [
        _entry(setup, "bv_tight", LEFT, setup.tail_mass * var, met),
        _entry(setup, "bv_coarse", LEFT, coarse, met),
        _entry(setup, "bv_tight", RIGHT, setup.head_mass * var, met),
        _entry(setup, "bv_coarse", RIGHT, coarse, met),
    ]


def decreasing_bounds(setup: Setup, monotonicity: str) -> list[BoundEntry]:
    f = setup.f
    drop = f(setup.a) - f(setup.b)
    met = monotonicity in (DECREASING, CONSTANT)
    return [
        _entry(setup, "decreasing", LEFT, drop * setup.tail_mass, met, one_sided=True),
        _entry(setup, "decreasing", RIGHT, drop * setup.head_mass, met, one_sided=True),
    ]


def lipschitz_bounds(setup: Setup, L: float) -> list[BoundEntry]:
    if L < 0:
        raise ValueError("the Lipschitz constant must be non-negative")
    met = math.isfinite(L)
    bound = 0.5 * L * (setup.rest ** 2 + setup.lam ** 2)
    entries = [
        _entry(setup, "lipschitz", LEFT, bound, met),
        _entry(setup, "lipschitz", RIGHT, bound, met),
    ]
    if setup.lam == 0.0:
        length = setup.b - setup.a
        entries.append(_entry(setup, "lipschitz_remark", LEFT, 0.5 * L * length ** 2, met,
                              gap=setup.weighted_integral))
    return entries


def monotone_bounds(setup: Setup, monotonicity: str) -> list[BoundEntry]:
    f, a, b, lam, rest = setup.f, setup.a, setup.b, setup.lam, setup.rest
    fa, fb = f(a), f(b)
    fm = f(min(a + lam, b))
    fr = f(max(b - lam, a))
    met = monotonicity in (NONDECREASING, CONSTANT)
    entries = [
        _entry(setup, "monotone", LEFT, lam * (fm - fa) + rest * (fb - fm), met),
        _entry(setup, "monotone", RIGHT, lam * (fb - fr) + rest * (fr - fa), met),
    ]
    if lam == 0.0:
        entries.append(_entry(setup, "monotone_remark", LEFT, (b - a) * (fb - fa), met,
                              gap=setup.weighted_integral))
    return entries


def ac_bounds(setup: Setup, profile: RegularityProfile, holder: HolderPair) -> list[BoundEntry]:
    if profile.deriv_norm_inf is None or profile.deriv_norm_1 is None:
        raise DerivativeUnavailable("derivative norms unavailable for f")
    if holder.p not in profile.deriv_norm_p:
        raise DerivativeUnavailable(f"||f'||_{holder.p:g} was not estimated")
    lam, rest, q = setup.lam, setup.rest, holder.q
    sup_branch = 0.5 * (lam ** 2 + rest ** 2) * profile.deriv_norm_inf
    expo = (q + 1.0) / q
    p_branch = (profile.deriv_norm_p[holder.p] / (q + 1.0) ** (1.0 / q)
                * (lam ** expo + rest ** expo))
    entries = []
    for side, mass in ((LEFT, setup.tail_mass), (RIGHT, setup.head_mass)):
        entries += [
            _entry(setup, "ac_inf", side, sup_branch, True),
            _entry(setup, "ac_p", side, p_branch, True),
            _entry(setup, "ac_1", side, mass * profile.deriv_norm_1, True),
        ]
    return entries


# --------------------------------------------------------------------------
# aggregation


def full_report(f: FunctionSpec, g: FunctionSpec, config: ReportConfig | None = None) -> BoundReport:
    """Compute lambda, both gaps, the regularity profile and every bound family.

    A family whose inputs cannot be computed is listed in ``skipped``; the
    rest of the report is still produced.  Violations of ``0 <= g <= A``
    raise :class:`HypothesisViolation`.
    """
    cfg = config or ReportConfig()
    holder = HolderPair.from_p(cfg.p)
    setup = prepare(f, g, cfg.A, tol=cfg.tol, n0=cfg.n0, n_max=cfg.n_max)
    prof = regularity.profile(f, ps=(holder.p,), n=cfg.estimation_n)

    entries: list[BoundEntry] = []
    skipped: list[tuple[str, str]] = []
    families = (
        ("bv", lambda: bv_bounds(setup, prof)),
        ("decreasing", lambda: decreasing_bounds(setup, prof.monotonicity)),
        ("lipschitz", lambda: lipschitz_bounds(setup, prof.lipschitz)),
        ("monotone", lambda: monotone_bounds(setup, prof.monotonicity)),
        ("ac", lambda: ac_bounds(setup, prof, holder)),
    )
    for name, compute in families:
        try:
            entries.extend(compute())
        except (DerivativeUnavailable, DomainError, ValueError, ArithmeticError) as exc:
            skipped.append((name, str(exc)))

    try:
        res_left, res_right = _residuals(f, g, cfg.A, cfg.residual_n)
    except HypothesisViolation:
        raise
    except (DomainError, ValueError, ArithmeticError) as exc:
        res_left = res_right = None
        skipped.append(("residuals", str(exc)))

    iv = f.interval
    return BoundReport(
        interval=(iv.a, iv.b),
        lam=setup.lam,
        hayashi_A=setup.A,
        left_gap=setup.left_gap,
        right_gap=setup.right_gap,
        regularity=prof,
        entries=entries,
        residual_left=res_left,
        residual_right=res_right,
        n_final=setup.n_final,
        achieved_tol=setup.achieved_tol,
        tol_report=setup.tol_report,
        sandwich=sandwich(f, g, setup=setup),
        sandwich_hypotheses_met=prof.monotonicity in (DECREASING, CONSTANT),
        skipped=skipped,
    )
