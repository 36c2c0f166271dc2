"""Acceptance suite. Each test records one PASS/FAIL line in the terminal summary."""

from __future__ import annotations

import csv
import io
import itertools
import time

from hypothesis import given, settings
from hypothesis import strategies as st

from tvra.analysis import assess_catalog, consistency_check, critical_set
from tvra.catalog import parse_catalog, serialize_catalog
from tvra.cli import run
from tvra.errors import InvalidRiskValueError
from tvra.model import InterfaceExpr, ThreatCategory
from tvra.report import build_matrix
from tvra.scoring import (
    AttackPotential,
    Impact,
    Likelihood,
    RiskClass,
    VulnerabilityRating,
    classify,
    likelihood_of,
    vulnerability_rating,
)

from conftest import SHIPPED
from strategies import assessment_sets, band_tables, catalogs

# Published countermeasure table, row label -> (risk label, catalog ids for that row).
# "Flooding and Spamming" is one row split into two catalog threats.
PUBLISHED_CLASSES = {
    "Eavesdropping and Traffic analysis": ("Major", ("eavesdropping",)),
    "Message Injection": ("Major", ("message-injection",)),
    "Spoofing": ("Critical", ("spoofing",)),
    "Replay": ("Critical", ("replay",)),
    "Flooding and Spamming": ("Major", ("dos-flooding", "dos-spamming")),
    "Blackhole": ("Critical", ("dos-blackhole",)),
    "Jamming": ("Critical", ("dos-jamming",)),
    "Illusion": ("Critical", ("illusion",)),
    "Phishing": ("Critical", ("phishing",)),
    "Network Intrusion": ("Critical", ("intrusion",)),
    "Sybil": ("Critical", ("sybil",)),
    "Message suppression": ("Major", ("message-suppression",)),
    "Malware": ("Critical", ("malware",)),
    "Masquerade": ("Major", ("masquerade",)),
    "Timing": ("Critical", ("timing",)),
    "Backdoor": ("Critical", ("backdoor",)),
    "Repudiation": ("Low", ("repudiation",)),
}
LABEL_TO_CLASS = {"Critical": RiskClass.CRITICAL, "Major": RiskClass.MAJOR, "Low": RiskClass.MINOR}

# Independent oracle for the scoring chain, written out by hand.
ORACLE_FACTORS = {
    "time": {"t1d": 0, "t1w": 1, "t1m": 4, "t3m": 10, "t6m": 17, "more": 19},
    "expertise": {"layman": 0, "proficient": 3, "expert": 6, "multiple": 8},
    "knowledge": {"public": 0, "restricted": 3, "sensitive": 7, "critical": 11},
    "opportunity": {"unnecessary": 0, "easy": 1, "moderate": 4, "difficult": 10},
    "equipment": {"standard": 0, "specialized": 4, "bespoke": 7, "multiple": 9},
}


def oracle_risk(p: AttackPotential, impact: int) -> str:
    if p.opportunity == "none":
        likelihood = 1
    else:
        pts = sum(ORACLE_FACTORS[f][getattr(p, f)] for f in ORACLE_FACTORS)
        likelihood = 3 if pts < 14 else 2 if pts < 20 else 1
    value = likelihood * impact
    return "Critical" if value >= 6 else "Major" if value == 4 else "Minor"


def call(*argv: str) -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    return run(list(argv), out, err), out.getvalue(), err.getvalue()


def test_criterion_1_published_classes(criterion, builtin):
    assert len(PUBLISHED_CLASSES) == 17
    started = time.perf_counter()
    code, _, err = call("assess", str(SHIPPED), "--strict")
    elapsed = time.perf_counter() - started

    got = {a.threat_id: a for a in assess_catalog(builtin)}
    mismatches = []
    for row, (label, tids) in PUBLISHED_CLASSES.items():
        for tid in tids:
            t = builtin.threat(tid)
            expected = LABEL_TO_CLASS[label]
            if got[tid].risk_class is not expected or t.declared_risk is not expected:
                mismatches.append(f"{row}/{tid}")
            if oracle_risk(t.potential, int(t.impact)) != expected.label:
                mismatches.append(f"{row}/{tid} (oracle)")
    warned = "NORMALIZED_RISK_LABEL" in err and "'repudiation'" in err
    discrepancies = consistency_check(got.values())
    ok = code == 0 and not mismatches and not discrepancies and warned and elapsed < 1.0
    criterion(
        "1 published risk classes reproduced",
        ok,
        f"17 rows, {sum(len(v[1]) for v in PUBLISHED_CLASSES.values())} ids, mismatches={mismatches}, "
        f"exit={code}, {elapsed:.3f}s",
    )


def test_criterion_2_critical_census(criterion, builtin):
    assessed = assess_catalog(builtin)
    by_class = {c: sorted(a.threat_id for a in assessed if a.risk_class is c) for c in RiskClass}
    expected_major = sorted(t for label, tids in PUBLISHED_CLASSES.values() if label == "Major" for t in tids)
    ok = (
        len(by_class[RiskClass.CRITICAL]) == 11
        and by_class[RiskClass.MAJOR] == expected_major
        and by_class[RiskClass.MINOR] == ["repudiation"]
    )
    criterion("2 critical census", ok, " ".join(f"{c.label}={len(v)}" for c, v in by_class.items()))


def test_criterion_3_interface_finding(criterion, builtin):
    critical = critical_set(assess_catalog(builtin))
    bad = sorted(t for t in critical if not (builtin.threat(t).mentions("A") or builtin.threat(t).mentions("B")))
    criterion("3 critical threats reach A or B", not bad, f"offenders={bad}")


def test_criterion_4_human_finding(criterion, builtin):
    got = {a.threat_id: a for a in assess_catalog(builtin)}
    human = sorted(t.id for t in builtin.threats if t.category is ThreatCategory.HUMAN)
    indexed_a = InterfaceExpr("A", indexed=True)
    ok = human == ["intrusion", "phishing"] and all(
        got[tid].risk_class is RiskClass.CRITICAL and indexed_a in builtin.threat(tid).interfaces for tid in human
    )
    criterion("4 human threats critical via A[*]", ok, f"human={human}")


def test_criterion_5_risk_arithmetic(criterion):
    counts = {c: 0 for c in RiskClass}
    products = set()
    for lk, im in itertools.product(Likelihood, Impact):
        v = int(lk) * int(im)
        products.add(v)
        counts[classify(v)] += 1
    rejected = []
    for v in (5, 7, 8):
        try:
            classify(v)
        except InvalidRiskValueError:
            rejected.append(v)
    ok = (
        products <= {1, 2, 3, 4, 6, 9}
        and (counts[RiskClass.MINOR], counts[RiskClass.MAJOR], counts[RiskClass.CRITICAL]) == (5, 1, 3)
        and rejected == [5, 7, 8]
    )
    criterion("5 risk arithmetic totality", ok, f"products={sorted(products)} rejected={rejected}")


RATING_LIKELIHOOD = {
    VulnerabilityRating.BEYOND_HIGH: Likelihood.UNLIKELY,
    VulnerabilityRating.HIGH: Likelihood.UNLIKELY,
    VulnerabilityRating.MODERATE: Likelihood.POSSIBLE,
    VulnerabilityRating.BASIC: Likelihood.LIKELY,
    VulnerabilityRating.NO_RATING: Likelihood.LIKELY,
}


def test_criterion_6_rating_likelihood(criterion):
    failures: list[str] = []
    mapping_ok = len(VulnerabilityRating) == 5 and all(likelihood_of(r) is l for r, l in RATING_LIKELIHOOD.items())

    @settings(max_examples=1000, deadline=None, database=None)
    @given(band_tables(), st.lists(st.integers(0, 200), min_size=2, max_size=8))
    def monotone(bands, points):
        ls = [likelihood_of(vulnerability_rating(p, bands)) for p in sorted(points)]
        if any(a < b for a, b in zip(ls, ls[1:])):
            failures.append(f"{bands} {points}")

    monotone()
    criterion("6 rating to likelihood mapping, monotone", mapping_ok and not failures, f"violations={len(failures)}")


def test_criterion_7_round_trip(criterion, builtin):
    failures: list[str] = []

    @settings(max_examples=500, deadline=None, database=None)
    @given(catalogs())
    def round_trip(c):
        text = serialize_catalog(c)
        if parse_catalog(text) != c:
            failures.append(c.name)

    round_trip()
    once = serialize_catalog(builtin)
    idempotent = serialize_catalog(parse_catalog(once)).encode() == once.encode()
    criterion("7 parser round-trip", not failures and idempotent, f"failures={len(failures)} idempotent={idempotent}")


def test_criterion_8_matrix_partition(criterion):
    failures: list[int] = []

    @settings(max_examples=300, deadline=None, database=None)
    @given(assessment_sets(max_size=100))
    def partition(assessments):
        m = build_matrix(assessments)
        seen = [tid for c in m.cells for tid in c.threat_ids]
        disjoint = len(seen) == len(set(seen))
        union = set(seen) == {a.threat_id for a in assessments}
        values = all(c.risk_value == int(c.likelihood) * int(c.impact) for c in m.cells)
        if not (disjoint and union and values):
            failures.append(len(assessments))

    partition()
    criterion("8 matrix partition", not failures, f"failures={failures}")


def test_criterion_9_determinism(criterion, builtin):
    first = call("assess", str(SHIPPED), "--format", "json")[1].encode()
    second = call("assess", str(SHIPPED), "--format", "json")[1].encode()
    text = call("assess", str(SHIPPED), "--format", "csv")[1]
    parsed = {
        (r["threat_id"], int(r["risk_value"]), r["risk_class"])
        for r in csv.DictReader(io.StringIO(text))
        if r["risk_value"]
    }
    expected = {(a.threat_id, a.risk_value, a.risk_class.keyword) for a in assess_catalog(builtin)}
    ok = first == second and len(first) > 0 and parsed == expected
    criterion("9 CSV/JSON determinism", ok, f"json bytes={len(first)} csv triples={len(parsed)}")
