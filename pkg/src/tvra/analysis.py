"""Assessment pipeline and aggregate queries over a catalog."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Sequence

from .diagnostics import Diagnostic, has_errors, warning
from .errors import CatalogError
from .model import Catalog, Threat, ThreatCategory, validate_model
from .scoring import (
    Impact,
    Infeasible,
    Likelihood,
    Points,
    RiskClass,
    VulnerabilityRating,
    classify,
    risk_value,
    score,
)

logger = logging.getLogger(__name__)

UNASSESSED = "unassessed"
EXPOSURE_BUCKETS = ("critical", "major", "minor", UNASSESSED)


@dataclass(frozen=True)
class Assessment:
    threat_id: str
    category: ThreatCategory
    points: Points
    rating: VulnerabilityRating
    likelihood: Likelihood
    impact: Impact
    risk_value: int
    risk_class: RiskClass
    declared_risk: Optional[RiskClass] = None

    @property
    def discrepancy(self) -> bool:
        return self.declared_risk is not None and self.declared_risk != self.risk_class


class Discrepancy(NamedTuple):
    threat_id: str
    declared: RiskClass
    computed: RiskClass


def assess_threat(threat: Threat, catalog: Catalog) -> Optional[Assessment]:
    if threat.potential is None:
        return None
    points, rating, likelihood = score(threat.potential, catalog.factor_table, catalog.band_table)
    value = risk_value(likelihood, threat.impact)
    return Assessment(
        threat_id=threat.id,
        category=threat.category,
        points=points,
        rating=rating,
        likelihood=likelihood,
        impact=threat.impact,
        risk_value=value,
        risk_class=classify(value),
        declared_risk=threat.declared_risk,
    )


def assessment_warnings(catalog: Catalog) -> list[Diagnostic]:
    """Threats skipped for lacking a worksheet, and infeasible worksheets."""
    out = []
    for t in catalog.threats:
        if t.potential is None:
            out.append(warning("NO_WORKSHEET", f"threat {t.id!r} has no attack potential; reported as unassessed", *t.pos))
        elif t.potential.opportunity == "none":
            out.append(warning("INFEASIBLE", f"threat {t.id!r} has opportunity 'none'; scored as Unlikely", *t.pos))
    return out


def assess_catalog(catalog: Catalog) -> list[Assessment]:
    """One Assessment per threat with a worksheet, ordered by threat id.

    Raises CatalogError if the catalog has validation errors.
    """
    diags = validate_model(catalog)
    if has_errors(diags):
        raise CatalogError(diags)
    for w in assessment_warnings(catalog):
        logger.warning("%s", w.message)
    results = (assess_threat(t, catalog) for t in catalog.threats)
    return sorted((a for a in results if a is not None), key=lambda a: a.threat_id)


def unassessed_threats(catalog: Catalog) -> list[Threat]:
    return sorted((t for t in catalog.threats if t.potential is None), key=lambda t: t.id)


def reference_points(catalog: Catalog) -> list[str]:
    """Declared interface ids, with ``ID[*]`` following each indexed one."""
    out = []
    for iface in catalog.interfaces:
        out.append(iface.id)
        if iface.indexed:
            out.append(f"{iface.id}[*]")
    return out


def _touches(threat: Threat, ref: str) -> bool:
    if ref.endswith("[*]"):
        via = ref[:-3]
        return any(e.indexed and e.via == via for e in threat.interfaces)
    return any(
        (e.via == ref and not e.indexed) or e.on_behalf_of == ref for e in threat.interfaces
    )


@dataclass(frozen=True)
class ExposureRow:
    reference: str
    threats: dict[str, tuple[str, ...]]  # bucket -> threat ids

    def count(self, bucket: str | RiskClass) -> int:
        key = bucket.keyword if isinstance(bucket, RiskClass) else bucket
        return len(self.threats[key])

    @property
    def counts(self) -> dict[str, int]:
        return {b: len(self.threats[b]) for b in EXPOSURE_BUCKETS}

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def threat_ids(self) -> tuple[str, ...]:
        return tuple(sorted(tid for ids in self.threats.values() for tid in ids))


@dataclass(frozen=True)
class ExposureReport:
    rows: tuple[ExposureRow, ...]

    def row(self, reference: str) -> ExposureRow:
        for r in self.rows:
            if r.reference == reference:
                return r
        raise KeyError(reference)

    def references(self) -> list[str]:
        return [r.reference for r in self.rows]


def exposure_by_interface(catalog: Catalog, assessments: Sequence[Assessment]) -> ExposureReport:
    """Threats per reference point, bucketed by risk class.

    ``A`` counts plain and delegated mentions of A; ``A[*]`` counts the
    indexed family separately.
    """
    by_id = {a.threat_id: a for a in assessments}
    rows = []
    for ref in reference_points(catalog):
        buckets: dict[str, list[str]] = {b: [] for b in EXPOSURE_BUCKETS}
        for t in catalog.threats:
            if not _touches(t, ref):
                continue
            a = by_id.get(t.id)
            buckets[a.risk_class.keyword if a else UNASSESSED].append(t.id)
        rows.append(ExposureRow(ref, {b: tuple(sorted(ids)) for b, ids in buckets.items()}))
    return ExposureReport(tuple(rows))


def critical_set(assessments: Iterable[Assessment]) -> set[str]:
    return {a.threat_id for a in assessments if a.risk_class is RiskClass.CRITICAL}


def consistency_check(assessments: Iterable[Assessment]) -> list[Discrepancy]:
    return [
        Discrepancy(a.threat_id, a.declared_risk, a.risk_class)
        for a in sorted(assessments, key=lambda a: a.threat_id)
        if a.discrepancy
    ]


@dataclass(frozen=True)
class PlanEntry:
    threat_id: str
    risk_class: Optional[RiskClass]  # None when the threat is unassessed
    countermeasures: tuple[str, ...]


@dataclass(frozen=True)
class CountermeasurePlan:
    entries: tuple[PlanEntry, ...]
    omitted: tuple[str, ...] = ()  # threats with no countermeasure

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def block(self, risk_class: Optional[RiskClass]) -> list[PlanEntry]:
        return [e for e in self.entries if e.risk_class == risk_class]


def countermeasure_plan(catalog: Catalog, assessments: Sequence[Assessment]) -> CountermeasurePlan:
    """Critical first, then Major, Minor, unassessed; alphabetical within a class."""
    by_id = {a.threat_id: a.risk_class for a in assessments}
    entries, omitted = [], []
    for t in catalog.threats:
        if not t.countermeasures:
            omitted.append(t.id)
            continue
        entries.append(PlanEntry(t.id, by_id.get(t.id), t.countermeasures))
    if omitted:
        logger.warning("no countermeasures for: %s", ", ".join(sorted(omitted)))
    entries.sort(key=lambda e: (-(e.risk_class or 0), e.threat_id))
    return CountermeasurePlan(tuple(entries), tuple(sorted(omitted)))


def human_threats(catalog: Catalog) -> list[Threat]:
    return [t for t in catalog.threats if t.category is ThreatCategory.HUMAN]


__all__ = [
    "Assessment",
    "CountermeasurePlan",
    "Discrepancy",
    "ExposureReport",
    "ExposureRow",
    "Infeasible",
    "PlanEntry",
    "UNASSESSED",
    "assess_catalog",
    "assess_threat",
    "assessment_warnings",
    "consistency_check",
    "countermeasure_plan",
    "critical_set",
    "exposure_by_interface",
    "human_threats",
    "reference_points",
    "unassessed_threats",
]
