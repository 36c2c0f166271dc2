"""Threat, vulnerability and risk analysis (TVRA) for vehicular communication
infrastructures.

Typical use::

    from tvra import load_builtin_catalog, assess_catalog, build_matrix, render_text

    catalog = load_builtin_catalog()
    print(render_text(build_matrix(assess_catalog(catalog))))
"""

import logging

from .analysis import (
    Assessment,
    CountermeasurePlan,
    ExposureReport,
    assess_catalog,
    consistency_check,
    countermeasure_plan,
    critical_set,
    exposure_by_interface,
)
from .catalog import diff_catalogs, load_builtin_catalog, load_catalog, parse_catalog, serialize_catalog
from .diagnostics import Diagnostic, Severity
from .errors import CatalogError, TvraError
from .model import Catalog, InterfaceExpr, Threat, entities_reachable_via, interface_expr_display, validate_model
from .report import RiskMatrix, build_matrix, emit_structured, render_text
from .scoring import (
    AttackPotential,
    BandTable,
    FactorTable,
    Impact,
    Likelihood,
    RiskClass,
    VulnerabilityRating,
    classify,
    likelihood_of,
    potential_points,
    risk_value,
    vulnerability_rating,
)

__version__ = "0.1.0"

logging.getLogger(__name__).addHandler(logging.NullHandler())

__all__ = [
    "Assessment",
    "AttackPotential",
    "BandTable",
    "Catalog",
    "CatalogError",
    "CountermeasurePlan",
    "Diagnostic",
    "ExposureReport",
    "FactorTable",
    "Impact",
    "InterfaceExpr",
    "Likelihood",
    "RiskClass",
    "RiskMatrix",
    "Severity",
    "Threat",
    "TvraError",
    "VulnerabilityRating",
    "assess_catalog",
    "build_matrix",
    "classify",
    "consistency_check",
    "countermeasure_plan",
    "critical_set",
    "diff_catalogs",
    "emit_structured",
    "entities_reachable_via",
    "exposure_by_interface",
    "interface_expr_display",
    "likelihood_of",
    "load_builtin_catalog",
    "load_catalog",
    "parse_catalog",
    "potential_points",
    "render_text",
    "risk_value",
    "serialize_catalog",
    "validate_model",
    "vulnerability_rating",
]
