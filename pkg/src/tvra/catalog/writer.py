"""Canonical text form of a catalog."""

from __future__ import annotations

from ..model import Catalog, Threat, interface_expr_display
from ..scoring import FACTORS, INFEASIBLE_LEVEL, LEVELS

INDENT = "  "


def quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _threat_lines(t: Threat) -> list[str]:
    lines = [f"threat {t.id} {{", f"{INDENT}name {quote(t.name)}", f"{INDENT}category {t.category.keyword}"]
    if t.group is not None:
        lines.append(f"{INDENT}group {t.group}")
    lines += [f"{INDENT}action {quote(a)}" for a in t.actions]
    lines.append(f"{INDENT}interfaces " + ", ".join(interface_expr_display(e) for e in t.interfaces))
    lines.append(f"{INDENT}objective {quote(t.objective)}")
    if t.violates:
        lines.append(f"{INDENT}violates " + ", ".join(s.keyword for s in t.violates))
    lines.append(f"{INDENT}impact {t.impact.keyword}")
    if t.potential is not None:
        lines.append(f"{INDENT}potential {{")
        lines += [f"{INDENT * 2}{name} {getattr(t.potential, name)}" for name in FACTORS]
        lines.append(f"{INDENT}}}")
    if t.declared_risk is not None:
        lines.append(f"{INDENT}declared_risk {t.declared_risk.keyword}")
    lines += [f"{INDENT}countermeasure {quote(c)}" for c in t.countermeasures]
    lines.append("}")
    return lines


def serialize_catalog(c: Catalog) -> str:
    """Blocks in the order header, assumptions, tables, interfaces, entities,
    links, assets, threats; each group sorted by id; one field per line."""
    sections: list[list[str]] = [[f"catalog {quote(c.name)} version {c.version}"]]
    if c.assumptions:
        sections.append([f"assumption {quote(a)}" for a in c.assumptions])

    if c.factor_table_override is not None:
        table = c.factor_table_override
        lines = ["factors {"]
        for name in FACTORS:
            lines.append(f"{INDENT}{name} {{")
            for level in LEVELS[name]:
                if level != INFEASIBLE_LEVEL:
                    lines.append(f"{INDENT * 2}{level} {getattr(table, name)[level]}")
            lines.append(f"{INDENT}}}")
        lines.append("}")
        sections.append(lines)
    if c.band_table_override is not None:
        lines = ["bands {"]
        lines += [f"{INDENT}{rating.keyword} {bound}" for bound, rating in c.band_table_override.bands]
        lines.append("}")
        sections.append(lines)

    for iface in c.interfaces:
        lines = [f"interface {iface.id} {{", f"{INDENT}description {quote(iface.description)}"]
        lines.append(f"{INDENT}indexed {'true' if iface.indexed else 'false'}")
        if iface.binds:
            lines.append(f"{INDENT}binds " + ", ".join(iface.binds))
        lines.append("}")
        sections.append(lines)
    for ent in c.entities:
        sections.append(
            [f"entity {ent.id} {{", f"{INDENT}kind {ent.kind.keyword}", f"{INDENT}label {quote(ent.label)}", "}"]
        )
    if c.links:
        sections.append([f"link {ln.source} -> {ln.target} kind {ln.kind.keyword}" for ln in c.links])
    for asset in c.assets:
        sections.append(
            [
                f"asset {asset.id} {{",
                f"{INDENT}class {asset.asset_class.keyword}",
                f"{INDENT}entity {asset.entity}",
                f"{INDENT}description {quote(asset.description)}",
                "}",
            ]
        )
    for threat in c.threats:
        sections.append(_threat_lines(threat))
    return "\n\n".join("\n".join(lines) for lines in sections) + "\n"
