"""JSON and CSV serialisation of bound reports.

Floats are written with ``repr`` (shortest string that round-trips, at most
17 significant digits), so parsing the output recovers every double exactly.
"""

from __future__ import annotations

import csv
import io
import json

from .steffensen import BoundReport

CSV_COLUMNS = ("family", "side", "bound", "gap", "slack", "holds", "hypotheses_met")
FORMATS = ("json", "csv")


def report_to_dict(report: BoundReport) -> dict:
    prof = report.regularity
    a, b = report.interval
    return {
        "interval": {"a": a, "b": b},
        "lambda": report.lam,
        "hayashi_A": report.hayashi_A,
        "left_gap": report.left_gap,
        "right_gap": report.right_gap,
        "regularity": {
            "total_variation": prof.total_variation,
            "lipschitz": prof.lipschitz,
            "monotonicity": prof.monotonicity,
            "deriv_norm_inf": prof.deriv_norm_inf,
            "deriv_norm_1": prof.deriv_norm_1,
            "deriv_norm_p": {repr(float(p)): v for p, v in prof.deriv_norm_p.items()},
            "estimation_grid_n": prof.estimation_grid_n,
            "derivative_source": prof.derivative_source,
            "estimated": True,
        },
        "entries": [
            {
                "family": e.family,
                "side": e.side,
                "bound": e.bound,
                "gap": e.gap,
                "holds": e.holds,
                "slack": e.slack,
                "hypotheses_met": e.hypotheses_met,
            }
            for e in report.entries
        ],
        "residuals": {"left": report.residual_left, "right": report.residual_right},
        "quadrature": {
            "n_final": report.n_final,
            "achieved_tol": report.achieved_tol,
            "tol_report": report.tol_report,
        },
        "sandwich": {
            "lower": report.sandwich.lower,
            "mid": report.sandwich.mid,
            "upper": report.sandwich.upper,
            "hypotheses_met": report.sandwich_hypotheses_met,
        },
        "skipped": [{"family": name, "reason": why} for name, why in report.skipped],
    }


def _csv_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_report(report: BoundReport, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(report_to_dict(report), indent=2)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for e in report.entries:
            writer.writerow([_csv_cell(getattr(e, col)) for col in CSV_COLUMNS])
        return buf.getvalue()
    raise ValueError(f"unknown format {fmt!r}; choose from {FORMATS}")


def parse_report(text: str, fmt: str = "json"):
    """Inverse of :func:`emit_report`: a dict for JSON, a list of row dicts for CSV."""
    if fmt == "json":
        return json.loads(text)
    rows = []
    for row in csv.DictReader(io.StringIO(text)):
        rows.append({
            "family": row["family"],
            "side": row["side"],
            "bound": float(row["bound"]),
            "gap": float(row["gap"]),
            "slack": float(row["slack"]),
            "holds": row["holds"] == "true",
            "hypotheses_met": row["hypotheses_met"] == "true",
        })
    return rows
