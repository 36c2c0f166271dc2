"""Risk matrix construction and report emitters.

All emitters are pure: identical inputs give byte-identical text.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Optional, Sequence

from .analysis import UNASSESSED, Assessment, CountermeasurePlan, ExposureReport, EXPOSURE_BUCKETS
from .errors import UnsupportedFormatError
from .model import Catalog
from .scoring import Impact, Infeasible, Likelihood, RiskClass, classify

WIDTH = 80

CSV_HEADER = (
    "threat_id",
    "category",
    "points",
    "rating",
    "likelihood",
    "impact",
    "risk_value",
    "risk_class",
    "declared_risk",
    "discrepancy",
)


@dataclass(frozen=True)
class MatrixCell:
    likelihood: Likelihood
    impact: Impact
    threat_ids: tuple[str, ...] = ()

    @property
    def risk_value(self) -> int:
        return int(self.likelihood) * int(self.impact)

    @property
    def risk_class(self) -> RiskClass:
        return classify(self.risk_value)


@dataclass(frozen=True)
class RiskMatrix:
    cells: tuple[MatrixCell, ...]  # row-major, likelihood 1..3 then impact 1..3

    def cell(self, likelihood: int, impact: int) -> MatrixCell:
        return self.cells[(int(likelihood) - 1) * 3 + (int(impact) - 1)]

    @property
    def total(self) -> int:
        return sum(len(c.threat_ids) for c in self.cells)

    def threat_ids(self) -> set[str]:
        return {tid for c in self.cells for tid in c.threat_ids}


def build_matrix(assessments: Sequence[Assessment]) -> RiskMatrix:
    placed: dict[tuple[int, int], list[str]] = {}
    for a in assessments:
        placed.setdefault((int(a.likelihood), int(a.impact)), []).append(a.threat_id)
    cells = tuple(
        MatrixCell(lk, im, tuple(sorted(placed.get((int(lk), int(im)), ()))))
        for lk in Likelihood
        for im in Impact
    )
    return RiskMatrix(cells)


def render_text(m: RiskMatrix) -> str:
    """Fixed 80-column grid: impact Low..High left to right, likelihood
    Likely..Unlikely top to bottom. Each cell shows class letter, risk value
    and threat count."""
    first, rest = 18, 19
    rule = "+" + "-" * first + ("+" + "-" * rest) * 3 + "+"

    def row(label: str, cells: list[str]) -> str:
        return "|" + f" {label}".ljust(first) + "".join("|" + f" {c}".ljust(rest) for c in cells) + "|"

    lines = [
        "Risk matrix (risk = likelihood x impact)".center(WIDTH).rstrip(),
        "",
        rule,
        row("Likelihood\\Impact", [f"{im.label} ({int(im)})" for im in Impact]),
        rule,
    ]
    for lk in sorted(Likelihood, reverse=True):
        cells = []
        for im in Impact:
            c = m.cell(lk, im)
            cells.append(f"{c.risk_class.letter}  r={c.risk_value}  n={len(c.threat_ids)}")
        lines.append(row(f"{lk.label} ({int(lk)})", cells))
        lines.append(rule)
    lines += [
        "Legend: m = minor (1-3)  M = major (4)  C = critical (6, 9)",
        "        r = risk value   n = threats in cell",
        f"Assessed threats: {m.total}",
    ]
    return "\n".join(lines) + "\n"


def _points_text(a: Assessment) -> str:
    return "infeasible" if a.points is Infeasible else str(a.points)


def render_assessments(assessments: Sequence[Assessment], catalog: Optional[Catalog] = None) -> str:
    """Per-threat table; unassessed catalog threats are listed with dashes."""
    header = f"{'threat':<22}{'category':<9}{'pts':>4}  {'rating':<12}{'L':>2}{'I':>3}{'R':>3}  {'class':<11}{'declared':<9}"
    lines = [header, "-" * len(header)]
    rows = [(a.threat_id, a) for a in assessments]
    if catalog is not None:
        seen = {a.threat_id for a in assessments}
        rows += [(t.id, t) for t in catalog.threats if t.id not in seen]
    for tid, item in sorted(rows, key=lambda r: r[0]):
        if isinstance(item, Assessment):
            a = item
            declared = a.declared_risk.keyword if a.declared_risk else "-"
            flag = "  !" if a.discrepancy else ""
            lines.append(
                f"{tid:<22.22}{a.category.keyword:<9}{_points_text(a):>4}  {a.rating.label:<12}"
                f"{int(a.likelihood):>2}{int(a.impact):>3}{a.risk_value:>3}  {a.risk_class.keyword:<11}{declared:<9}{flag}"
            )
        else:
            declared = item.declared_risk.keyword if item.declared_risk else "-"
            lines.append(
                f"{tid:<22.22}{item.category.keyword:<9}{'-':>4}  {'-':<12}{'-':>2}{int(item.impact):>3}{'-':>3}  "
                f"{UNASSESSED:<11}{declared:<9}"
            )
    return "\n".join(line.rstrip() for line in lines) + "\n"


def render_plan(plan: CountermeasurePlan) -> str:
    lines = []
    current = object()
    for entry in plan.entries:
        if entry.risk_class != current:
            current = entry.risk_class
            if lines:
                lines.append("")
            lines.append(f"[{current.label if current else 'Unassessed'}]")
        lines.append(f"{entry.threat_id}")
        lines += [f"  - {c}" for c in entry.countermeasures]
    return "\n".join(lines) + "\n" if lines else ""


def render_exposure(report: ExposureReport) -> str:
    header = f"{'interface':<10}" + "".join(f"{b:>12}" for b in EXPOSURE_BUCKETS) + f"{'total':>8}"
    lines = [header, "-" * len(header)]
    for r in report.rows:
        lines.append(f"{r.reference:<10}" + "".join(f"{r.counts[b]:>12}" for b in EXPOSURE_BUCKETS) + f"{r.total:>8}")
    for r in report.rows:
        lines.append("")
        lines.append(f"{r.reference}:")
        for b in EXPOSURE_BUCKETS:
            if r.threats[b]:
                lines.append(f"  {b}: {', '.join(r.threats[b])}")
    return "\n".join(lines) + "\n"


def _assessment_record(a: Assessment) -> dict:
    return {
        "threat_id": a.threat_id,
        "category": a.category.keyword,
        "points": None if a.points is Infeasible else a.points,
        "infeasible": a.points is Infeasible,
        "rating": a.rating.keyword,
        "likelihood": int(a.likelihood),
        "impact": int(a.impact),
        "risk_value": a.risk_value,
        "risk_class": a.risk_class.keyword,
        "declared_risk": a.declared_risk.keyword if a.declared_risk else None,
        "discrepancy": a.discrepancy,
    }


def _unassessed_records(catalog: Optional[Catalog], assessments: Sequence[Assessment]) -> list[dict]:
    if catalog is None:
        return []
    seen = {a.threat_id for a in assessments}
    return [
        {
            "threat_id": t.id,
            "category": t.category.keyword,
            "points": None,
            "infeasible": False,
            "rating": None,
            "likelihood": None,
            "impact": int(t.impact),
            "risk_value": None,
            "risk_class": UNASSESSED,
            "declared_risk": t.declared_risk.keyword if t.declared_risk else None,
            "discrepancy": False,
        }
        for t in catalog.threats
        if t.id not in seen
    ]


def emit_structured(
    assessments: Sequence[Assessment],
    matrix: RiskMatrix,
    plan: CountermeasurePlan,
    format: str,
    *,
    catalog: Optional[Catalog] = None,
) -> str:
    """JSON document (``assessments``, ``matrix``, ``plan``) or assessments CSV.

    When ``catalog`` is given, threats without a worksheet are included with
    empty numeric fields and class ``unassessed``.
    """
    records = [_assessment_record(a) for a in assessments] + _unassessed_records(catalog, assessments)
    records.sort(key=lambda r: r["threat_id"])

    if format == "json":
        doc = {
            "assessments": records,
            "matrix": [
                {
                    "likelihood": int(c.likelihood),
                    "impact": int(c.impact),
                    "risk_value": c.risk_value,
                    "risk_class": c.risk_class.keyword,
                    "threat_ids": list(c.threat_ids),
                }
                for c in matrix.cells
                if c.threat_ids
            ],
            "plan": [
                {
                    "threat_id": e.threat_id,
                    "risk_class": e.risk_class.keyword if e.risk_class else UNASSESSED,
                    "countermeasures": list(e.countermeasures),
                }
                for e in plan.entries
            ],
        }
        return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in records:
            points = "infeasible" if r["infeasible"] else r["points"]
            writer.writerow(
                [
                    r["threat_id"],
                    r["category"],
                    "" if points is None else points,
                    r["rating"] or "",
                    "" if r["likelihood"] is None else r["likelihood"],
                    r["impact"],
                    "" if r["risk_value"] is None else r["risk_value"],
                    r["risk_class"],
                    r["declared_risk"] or "",
                    "true" if r["discrepancy"] else "false",
                ]
            )
        return buf.getvalue()

    raise UnsupportedFormatError(f"unsupported format {format!r}; expected json or csv")
