"""Structural comparison of two catalogs."""

from __future__ import annotations

from dataclasses import dataclass, fields

from ..model import AccessInterface, Catalog, Threat, interface_expr_display


@dataclass(frozen=True)
class FieldChange:
    field: str
    before: str
    after: str


@dataclass(frozen=True)
class Modification:
    id: str
    changes: tuple[FieldChange, ...]


@dataclass(frozen=True)
class ChangeSet:
    added_threats: tuple[str, ...] = ()
    removed_threats: tuple[str, ...] = ()
    modified_threats: tuple[Modification, ...] = ()
    added_interfaces: tuple[str, ...] = ()
    removed_interfaces: tuple[str, ...] = ()
    modified_interfaces: tuple[Modification, ...] = ()
    # (threat id, countermeasure text)
    added_countermeasures: tuple[tuple[str, str], ...] = ()
    removed_countermeasures: tuple[tuple[str, str], ...] = ()

    def __bool__(self) -> bool:
        return any(getattr(self, f.name) for f in fields(self))

    @property
    def is_empty(self) -> bool:
        return not self


def _render(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "true" if value else "false"
    if hasattr(value, "keyword"):
        return value.keyword
    if hasattr(value, "levels"):
        return " ".join(f"{k}={v}" for k, v in value.levels().items())
    if isinstance(value, tuple):
        if value and hasattr(value[0], "via"):
            return ", ".join(interface_expr_display(e) for e in value)
        return " | ".join(_render(v) for v in value)
    return str(value)


def _field_changes(a, b) -> tuple[FieldChange, ...]:
    out = []
    for f in fields(a):
        if f.name in ("id", "pos"):
            continue
        va, vb = getattr(a, f.name), getattr(b, f.name)
        if va != vb:
            out.append(FieldChange(f.name, _render(va), _render(vb)))
    return tuple(out)


def _compare(old: dict, new: dict) -> tuple[tuple[str, ...], tuple[str, ...], tuple[Modification, ...]]:
    added = tuple(sorted(set(new) - set(old)))
    removed = tuple(sorted(set(old) - set(new)))
    modified = []
    for key in sorted(set(old) & set(new)):
        changes = _field_changes(old[key], new[key])
        if changes:
            modified.append(Modification(key, changes))
    return added, removed, tuple(modified)


def diff_catalogs(a: Catalog, b: Catalog) -> ChangeSet:
    old_threats: dict[str, Threat] = {t.id: t for t in a.threats}
    new_threats: dict[str, Threat] = {t.id: t for t in b.threats}
    old_ifaces: dict[str, AccessInterface] = {i.id: i for i in a.interfaces}
    new_ifaces: dict[str, AccessInterface] = {i.id: i for i in b.interfaces}

    t_add, t_rem, t_mod = _compare(old_threats, new_threats)
    i_add, i_rem, i_mod = _compare(old_ifaces, new_ifaces)

    old_cm = {(t.id, c) for t in a.threats for c in t.countermeasures}
    new_cm = {(t.id, c) for t in b.threats for c in t.countermeasures}
    return ChangeSet(
        added_threats=t_add,
        removed_threats=t_rem,
        modified_threats=t_mod,
        added_interfaces=i_add,
        removed_interfaces=i_rem,
        modified_interfaces=i_mod,
        added_countermeasures=tuple(sorted(new_cm - old_cm)),
        removed_countermeasures=tuple(sorted(old_cm - new_cm)),
    )


def render_changeset(cs: ChangeSet) -> str:
    if not cs:
        return "no changes\n"
    lines: list[str] = []
    for kind in ("interface", "threat"):
        for ident in getattr(cs, f"added_{kind}s"):
            lines.append(f"+ {kind} {ident}")
        for ident in getattr(cs, f"removed_{kind}s"):
            lines.append(f"- {kind} {ident}")
        for mod in getattr(cs, f"modified_{kind}s"):
            lines.append(f"~ {kind} {mod.id}")
            for ch in mod.changes:
                lines.append(f"    {ch.field}: {ch.before} -> {ch.after}")
    for tid, text in cs.added_countermeasures:
        lines.append(f"+ countermeasure {tid}: {text}")
    for tid, text in cs.removed_countermeasures:
        lines.append(f"- countermeasure {tid}: {text}")
    return "\n".join(lines) + "\n"
