"""Property suites over seeded random cases.

Every failing check is recorded as a counterexample keyed by
``(seed, index)`` so it can be replayed with :func:`replay`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from . import regularity, steffensen
from .cases import MIXED, CaseGenerator, generate_case
from .numerics import (
    DEFAULT_N0, DEFAULT_N_MAX, DEFAULT_TOL, Affine, ExprFunction, FunctionSpec,
    Interval, rs_integrate,
)
from .steffensen import LEFT, RIGHT, BoundReport, ReportConfig

PROPERTIES = (
    "sandwich",
    "bound_dominance",
    "bv_ordering",
    "identity_convergence",
    "reflection_duality",
    "hayashi_reduction",
    "variation_refinement",
    "variation_vs_derivative",
    "variation_vs_lipschitz",
    "rs_by_parts",
)

RESIDUAL_NS = (512, 1024, 2048, 4096)
RESIDUAL_MAX = 1e-5
RESIDUAL_MONOTONE_SLACK = 1e-12
REFLECTION_TOL = 1e-9
HAYASHI_TOL = 1e-12
HAYASHI_SCALES = (1.0, 2.0, 7.5)
BY_PARTS_TOL = 1e-6
VARIATION_L1_TOL = 1e-3


@dataclass(frozen=True)
class RunConfig:
    cases: int = 1000
    seed: int = 0
    family: str = MIXED
    tol: float = DEFAULT_TOL
    n0: int = DEFAULT_N0
    n_max: int = DEFAULT_N_MAX
    p: float = 2.0
    A: float = 1.0
    format: str = "json"
    interval: Interval | None = None

    def __post_init__(self):
        if self.cases < 0:
            raise ValueError("case count must be non-negative")
        if not (self.tol > 0 and self.p > 1 and self.A > 0):
            raise ValueError("tol, p - 1 and A must be positive")
        if self.n0 < 2 or self.n_max < 4 * self.n0:
            raise ValueError("need n0 >= 2 and n_max >= 4 * n0")
        if self.format not in ("json", "csv"):
            raise ValueError(f"unknown format {self.format!r}")

    def report_config(self) -> ReportConfig:
        return ReportConfig(tol=self.tol, n0=self.n0, n_max=self.n_max, p=self.p, A=self.A)

    def generator(self) -> CaseGenerator:
        return CaseGenerator(self.seed, self.family, self.interval)


@dataclass
class Check:
    prop: str
    ok: bool
    detail: str = ""


@dataclass
class CaseResult:
    index: int
    family: str
    checks: list[Check] = field(default_factory=list)
    worst_slack: float = math.inf
    worst_residual: float = 0.0
    report: BoundReport | None = None

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.ok]


@dataclass
class SuiteSummary:
    seed: int
    family: str
    cases: int
    counts: dict[str, dict[str, int]]
    worst_slack: float | None
    worst_residual: float | None
    counterexamples: list[dict]

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "family": self.family,
            "cases": self.cases,
            "passed": self.passed,
            "properties": self.counts,
            "worst_slack": self.worst_slack,
            "worst_residual": self.worst_residual,
            "counterexamples": self.counterexamples,
        }


def _describe(spec: FunctionSpec) -> str:
    return spec.source if isinstance(spec, ExprFunction) else repr(spec)


# --------------------------------------------------------------------------
# individual properties


def check_sandwich(report: BoundReport) -> Check | None:
    if not report.sandwich_hypotheses_met:
        return None
    lo, mid, hi = report.sandwich
    tol = report.tol_report
    ok = lo - tol <= mid <= hi + tol
    return Check("sandwich", ok, f"lower={lo!r} mid={mid!r} upper={hi!r} tol={tol!r}")


def check_dominance(report: BoundReport) -> Check:
    bad = report.violations()
    detail = "; ".join(f"{e.family}/{e.side}: bound={e.bound!r} gap={e.gap!r}" for e in bad)
    return Check("bound_dominance", not bad, detail)


def check_bv_ordering(report: BoundReport) -> Check:
    details = []
    for side in (LEFT, RIGHT):
        tight = report.entry("bv_tight", side).bound
        coarse = report.entry("bv_coarse", side).bound
        if tight > coarse + 1e-12 * max(1.0, abs(coarse)):
            details.append(f"{side}: tight={tight!r} > coarse={coarse!r}")
    return Check("bv_ordering", not details, "; ".join(details))


def identity_sequence(f: FunctionSpec, g: FunctionSpec, ns=RESIDUAL_NS, A: float = 1.0):
    return [steffensen._residuals(f, g, A, n) for n in ns]


def check_identity_convergence(f: FunctionSpec, g: FunctionSpec, ns=RESIDUAL_NS) -> tuple[Check, float]:
    seq = identity_sequence(f, g, ns)
    problems = []
    for side, k in ((LEFT, 0), (RIGHT, 1)):
        vals = [r[k] for r in seq]
        for n_prev, n_next, r0, r1 in zip(ns, ns[1:], vals, vals[1:]):
            if r1 > r0 + RESIDUAL_MONOTONE_SLACK:
                problems.append(f"{side}: residual({n_next})={r1:.3g} > residual({n_prev})={r0:.3g}")
        if vals[-1] > RESIDUAL_MAX:
            problems.append(f"{side}: residual({ns[-1]})={vals[-1]:.3g} > {RESIDUAL_MAX:g}")
    worst = max(seq[-1])
    return Check("identity_convergence", not problems, "; ".join(problems)), worst


def reflection_data(f: FunctionSpec, g: FunctionSpec, cfg: ReportConfig) -> dict:
    s = steffensen.prepare(f, g, cfg.A, tol=cfg.tol, n0=cfg.n0, n_max=cfg.n_max)
    var = regularity.total_variation(f, cfg.estimation_n)
    return {
        "lam": s.lam,
        "left_gap": s.left_gap,
        "right_gap": s.right_gap,
        "tight_left": s.tail_mass * var,
        "tight_right": s.head_mass * var,
    }


def check_reflection(f: FunctionSpec, g: FunctionSpec, cfg: ReportConfig) -> Check:
    orig = reflection_data(f, g, cfg)
    refl = reflection_data(f.reflect(), g.reflect(), cfg)
    diffs = {
        "lambda": refl["lam"] - orig["lam"],
        "gap": refl["right_gap"] + orig["left_gap"],
        "bv_tight": refl["tight_right"] - orig["tight_left"],
    }
    bad = {k: v for k, v in diffs.items() if not abs(v) <= REFLECTION_TOL}
    return Check("reflection_duality", not bad, ", ".join(f"{k} off by {v:.3g}" for k, v in bad.items()))


def compare_reports(base: BoundReport, other: BoundReport, tol: float = HAYASHI_TOL) -> list[str]:
    problems = []
    for name in ("lam", "left_gap", "right_gap"):
        d = getattr(other, name) - getattr(base, name)
        if not abs(d) <= tol:
            problems.append(f"{name} off by {d:.3g}")
    keys_base = [(e.family, e.side) for e in base.entries]
    keys_other = [(e.family, e.side) for e in other.entries]
    if keys_base != keys_other:
        problems.append("different bound families emitted")
        return problems
    for e0, e1 in zip(base.entries, other.entries):
        d = e1.bound - e0.bound
        if not abs(d) <= tol:
            problems.append(f"{e0.family}/{e0.side} bound off by {d:.3g}")
    return problems


def check_hayashi(f: FunctionSpec, g: FunctionSpec, base: BoundReport, cfg: ReportConfig,
                  scales=HAYASHI_SCALES, residual_n: int = 1024) -> Check:
    problems = []
    for A in scales:
        other = steffensen.full_report(f, Affine(g, A), replace(cfg, A=A * cfg.A))
        problems += [f"A={A:g}: {p}" for p in compare_reports(base, other)]
    scaled = steffensen.hayashi_residuals(f, g, 1.0, residual_n)
    plain = (steffensen.identity_residual_left(f, g, residual_n),
             steffensen.identity_residual_right(f, g, residual_n))
    if scaled != plain:
        problems.append(f"A=1 residuals {scaled!r} differ from unscaled {plain!r}")
    return Check("hayashi_reduction", not problems, "; ".join(problems))


def check_variation_refinement(f: FunctionSpec, ns=(64, 128, 256, 512, 1024, 2048, 4096)) -> Check:
    vals = [regularity.total_variation(f, n) for n in ns]
    bad = [(n, v0, v1) for n, v0, v1 in zip(ns[1:], vals, vals[1:])
           if v1 < v0 - 1e-12 * max(1.0, v0)]
    return Check("variation_refinement", not bad,
                 "; ".join(f"n={n}: {v1!r} < {v0!r}" for n, v0, v1 in bad))


def check_variation_vs_derivative(f: FunctionSpec, prof) -> Check | None:
    if prof.deriv_norm_1 is None or prof.derivative_source == "grid":
        return None
    d = abs(prof.total_variation - prof.deriv_norm_1)
    return Check("variation_vs_derivative", d <= VARIATION_L1_TOL,
                 f"|TV - ||f'||_1| = {d:.3g}")


def check_variation_vs_lipschitz(f: FunctionSpec, prof) -> Check:
    iv = f.interval
    cap = prof.lipschitz * iv.length
    ok = prof.total_variation <= cap + 1e-9 * max(1.0, cap)
    detail = ""
    if prof.monotonicity != regularity.NEITHER:
        rise = abs(f(iv.b) - f(iv.a))
        if abs(prof.total_variation - rise) > 1e-9 * max(1.0, rise):
            ok = False
            detail = f"monotone f but TV={prof.total_variation!r} != |f(b)-f(a)|={rise!r}"
    if prof.total_variation < abs(f(iv.b) - f(iv.a)) - 1e-9:
        ok = False
    return Check("variation_vs_lipschitz", ok, detail or f"TV={prof.total_variation!r} L*(b-a)={cap!r}")


def check_by_parts(f: FunctionSpec, g: FunctionSpec, n: int = 4096) -> Check | None:
    if f.derivative() is None or g.derivative() is None:
        return None
    iv = f.interval
    lhs = rs_integrate(g, f, iv, n) + rs_integrate(f, g, iv, n)
    rhs = g(iv.b) * f(iv.b) - g(iv.a) * f(iv.a)
    return Check("rs_by_parts", abs(lhs - rhs) <= BY_PARTS_TOL, f"|lhs - rhs| = {abs(lhs - rhs):.3g}")


# --------------------------------------------------------------------------
# drivers


def check_case(gen: CaseGenerator, index: int, cfg: ReportConfig,
               properties=PROPERTIES) -> CaseResult:
    """Run the requested properties on case ``index`` of ``gen``."""
    f, g = generate_case(gen, index)
    result = CaseResult(index, gen.family_of(index))
    smooth = isinstance(f, ExprFunction)
    wanted = set(properties)

    report = steffensen.full_report(f, g, cfg)
    result.report = report
    met = [e.slack for e in report.entries if e.hypotheses_met]
    if met:
        result.worst_slack = min(met)

    checks: list[Check | None] = []
    if "sandwich" in wanted:
        checks.append(check_sandwich(report))
    if "bound_dominance" in wanted:
        checks.append(check_dominance(report))
    if "bv_ordering" in wanted:
        checks.append(check_bv_ordering(report))
    if "identity_convergence" in wanted and smooth:
        check, worst = check_identity_convergence(f, g)
        result.worst_residual = worst
        checks.append(check)
    if "reflection_duality" in wanted:
        checks.append(check_reflection(f, g, cfg))
    if "hayashi_reduction" in wanted:
        checks.append(check_hayashi(f, g, report, cfg))
    if "variation_refinement" in wanted:
        checks.append(check_variation_refinement(f))
    if "variation_vs_derivative" in wanted:
        checks.append(check_variation_vs_derivative(f, report.regularity))
    if "variation_vs_lipschitz" in wanted:
        checks.append(check_variation_vs_lipschitz(f, report.regularity))
    if "rs_by_parts" in wanted and smooth:
        checks.append(check_by_parts(f, g))
    result.checks = [c for c in checks if c is not None]
    return result


def _counterexample(gen: CaseGenerator, index: int, check: Check, f=None, g=None) -> dict:
    entry = {
        "property": check.prop,
        "seed": gen.seed,
        "index": index,
        "family": gen.family_of(index),
        "detail": check.detail,
    }
    if f is not None:
        entry["f"] = _describe(f)
        entry["g"] = _describe(g)
    return entry


def run_suite(config: RunConfig, properties=PROPERTIES) -> SuiteSummary:
    """Run every property on ``config.cases`` seeded cases and aggregate."""
    gen = config.generator()
    cfg = config.report_config()
    counts = {p: {"checked": 0, "failed": 0} for p in properties}
    counts["errors"] = {"checked": 0, "failed": 0}
    counterexamples = []
    worst_slack = math.inf
    worst_residual = 0.0

    for index in range(config.cases):
        counts["errors"]["checked"] += 1
        try:
            result = check_case(gen, index, cfg, properties)
        except Exception as exc:  # any crash is itself a counterexample
            counts["errors"]["failed"] += 1
            counterexamples.append(
                _counterexample(gen, index, Check("errors", False, f"{type(exc).__name__}: {exc}"))
            )
            continue
        worst_slack = min(worst_slack, result.worst_slack)
        worst_residual = max(worst_residual, result.worst_residual)
        for check in result.checks:
            counts[check.prop]["checked"] += 1
            if not check.ok:
                counts[check.prop]["failed"] += 1
                f, g = generate_case(gen, index)
                counterexamples.append(_counterexample(gen, index, check, f, g))

    counterexamples.sort(key=lambda c: (c["seed"], c["index"], c["property"]))
    return SuiteSummary(
        seed=config.seed,
        family=config.family,
        cases=config.cases,
        counts=counts,
        worst_slack=None if math.isinf(worst_slack) else worst_slack,
        worst_residual=worst_residual if config.cases else None,
        counterexamples=counterexamples,
    )


def replay(seed: int, index: int, family: str = MIXED, cfg: ReportConfig | None = None,
           interval: Interval | None = None) -> BoundReport:
    """Recompute the report of a dumped counterexample."""
    f, g = generate_case(CaseGenerator(seed, family, interval), index)
    return steffensen.full_report(f, g, cfg or ReportConfig())
