"""Target-of-evaluation domain types and referential-integrity validation."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional

from .diagnostics import Diagnostic, error, sort_diagnostics, warning
from .errors import UnknownInterfaceError
from .scoring import (
    DEFAULT_BAND_TABLE,
    DEFAULT_FACTOR_TABLE,
    AttackPotential,
    BandTable,
    FactorTable,
    Impact,
    RiskClass,
    UnknownLevelError,
    potential_points,
)

ID_PATTERN = re.compile(r"[A-Za-z](?:[A-Za-z0-9_]|-(?!>))*")

Pos = tuple[int, int]
NOWHERE: Pos = (1, 1)


def _pos():
    return field(default=NOWHERE, compare=False, repr=False)


class KeywordEnum(Enum):
    """Enum whose value is its lowercase keyword in the catalog format."""

    @property
    def keyword(self) -> str:
        return self.value

    @property
    def label(self) -> str:
        return self.name.replace("_", " ").title().replace(" ", "")

    @property
    def rank(self) -> int:
        return list(type(self)).index(self)

    @classmethod
    def from_keyword(cls, word: str):
        for member in cls:
            if member.value == word:
                return member
        raise ValueError(f"unknown {cls.__name__} {word!r}")

    @classmethod
    def keywords(cls) -> tuple[str, ...]:
        return tuple(m.value for m in cls)


class SecurityService(KeywordEnum):
    CONFIDENTIALITY = "confidentiality"
    INTEGRITY = "integrity"
    AVAILABILITY = "availability"
    PRIVACY = "privacy"
    AUTHENTICATION = "authentication"
    AUTHORIZATION = "authorization"
    PLAUSIBILITY = "plausibility"
    NON_REPUDIATION = "non-repudiation"


class AssetClass(KeywordEnum):
    PHYSICAL = "physical"
    LOGICAL = "logical"
    HUMAN = "human"


class EntityKind(KeywordEnum):
    VEHICLE = "vehicle"
    RSU = "rsu"
    HMI = "hmi"
    PASSENGER_DEVICE = "device"
    NETWORK_DOMAIN = "network"
    SERVICE = "service"
    HUMAN = "human"


class LinkKind(KeywordEnum):
    V2V = "v2v"
    V2I = "v2i"
    V2X = "v2x"
    MANAGED = "managed"


class ThreatCategory(KeywordEnum):
    DATA = "data"
    LOGICAL = "logical"
    HUMAN = "human"


@dataclass(frozen=True)
class Entity:
    id: str
    kind: EntityKind
    label: str = ""
    pos: Pos = _pos()


@dataclass(frozen=True)
class Link:
    source: str
    target: str
    kind: LinkKind
    pos: Pos = _pos()

    def sort_key(self) -> tuple[str, str, int]:
        return (self.source, self.target, self.kind.rank)


@dataclass(frozen=True)
class InfrastructureModel:
    entities: tuple[Entity, ...]
    links: tuple[Link, ...]

    def neighbours(self, entity_id: str) -> set[str]:
        out = set()
        for link in self.links:
            if link.source == entity_id:
                out.add(link.target)
            elif link.target == entity_id:
                out.add(link.source)
        return out


@dataclass(frozen=True)
class Asset:
    id: str
    asset_class: AssetClass
    entity: str
    description: str = ""
    pos: Pos = _pos()


@dataclass(frozen=True)
class AccessInterface:
    """A reference point. ``indexed`` declares the family form ``ID[*]``
    (one interface per passenger device, i = 1..n)."""

    id: str
    description: str = ""
    indexed: bool = False
    binds: tuple[str, ...] = ()
    pos: Pos = _pos()

    def __post_init__(self) -> None:
        object.__setattr__(self, "binds", tuple(sorted(set(self.binds))))

    @property
    def human_origin(self) -> bool:
        text = self.description.lower()
        return "human" in text or "passenger" in text


@dataclass(frozen=True)
class InterfaceExpr:
    """``A`` | ``A[*]`` (indexed family) | ``B@E`` (B on behalf of E)."""

    via: str
    on_behalf_of: Optional[str] = None
    indexed: bool = False
    pos: Pos = _pos()

    def __post_init__(self) -> None:
        if self.indexed and self.on_behalf_of is not None:
            raise ValueError("an interface expression cannot be both indexed and delegated")

    def mentions(self) -> tuple[str, ...]:
        if self.on_behalf_of is None:
            return (self.via,)
        return (self.via, self.on_behalf_of)

    def sort_key(self) -> tuple[str, bool, str, bool]:
        return (self.via, self.on_behalf_of is not None, self.on_behalf_of or "", self.indexed)

    def __str__(self) -> str:
        return interface_expr_display(self)


def interface_expr_display(e: InterfaceExpr) -> str:
    if e.on_behalf_of is not None:
        return f"{e.via}@{e.on_behalf_of}"
    if e.indexed:
        return f"{e.via}[*]"
    return e.via


_EXPR = re.compile(
    rf"\s*(?P<via>{ID_PATTERN.pattern})\s*(?:(?P<idx>\[\*\])|@\s*(?P<obo>{ID_PATTERN.pattern}))?\s*"
)


def parse_interface_expr(text: str) -> InterfaceExpr:
    m = _EXPR.fullmatch(text)
    if not m:
        raise ValueError(f"malformed interface expression {text!r}")
    return InterfaceExpr(m["via"], m["obo"], bool(m["idx"]))


@dataclass(frozen=True)
class Threat:
    id: str
    name: str
    category: ThreatCategory
    actions: tuple[str, ...]
    interfaces: tuple[InterfaceExpr, ...]
    objective: str
    impact: Impact
    violates: tuple[SecurityService, ...] = ()
    potential: Optional[AttackPotential] = None
    declared_risk: Optional[RiskClass] = None
    countermeasures: tuple[str, ...] = ()
    group: Optional[str] = None
    pos: Pos = _pos()

    def __post_init__(self) -> None:
        object.__setattr__(self, "actions", tuple(self.actions))
        object.__setattr__(self, "countermeasures", tuple(self.countermeasures))
        exprs = {e.sort_key(): e for e in reversed(tuple(self.interfaces))}
        object.__setattr__(self, "interfaces", tuple(exprs[k] for k in sorted(exprs)))
        object.__setattr__(self, "violates", tuple(sorted(set(self.violates), key=lambda s: s.rank)))

    def mentions(self, interface_id: str) -> bool:
        return any(interface_id in e.mentions() for e in self.interfaces)


@dataclass(frozen=True)
class Catalog:
    """A parsed threat model. Collections are kept sorted by id so that
    equality is independent of declaration order."""

    name: str
    version: int = 1
    assumptions: tuple[str, ...] = ()
    interfaces: tuple[AccessInterface, ...] = ()
    entities: tuple[Entity, ...] = ()
    links: tuple[Link, ...] = ()
    assets: tuple[Asset, ...] = ()
    threats: tuple[Threat, ...] = ()
    factor_table_override: Optional[FactorTable] = None
    band_table_override: Optional[BandTable] = None
    warnings: tuple[Diagnostic, ...] = field(default=(), compare=False, repr=False)
    pos: Pos = _pos()

    def __post_init__(self) -> None:
        object.__setattr__(self, "assumptions", tuple(self.assumptions))
        for name in ("interfaces", "entities", "assets", "threats"):
            items = tuple(sorted(getattr(self, name), key=lambda x: x.id))
            object.__setattr__(self, name, items)
        object.__setattr__(self, "links", tuple(sorted(self.links, key=Link.sort_key)))
        object.__setattr__(self, "warnings", tuple(self.warnings))

    @property
    def factor_table(self) -> FactorTable:
        return self.factor_table_override or DEFAULT_FACTOR_TABLE

    @property
    def band_table(self) -> BandTable:
        return self.band_table_override or DEFAULT_BAND_TABLE

    @property
    def infrastructure(self) -> InfrastructureModel:
        return InfrastructureModel(self.entities, self.links)

    def interface(self, interface_id: str) -> AccessInterface:
        for iface in self.interfaces:
            if iface.id == interface_id:
                return iface
        raise UnknownInterfaceError(f"interface {interface_id!r} is not declared")

    def threat(self, threat_id: str) -> Threat:
        for t in self.threats:
            if t.id == threat_id:
                return t
        raise KeyError(threat_id)

    def entity(self, entity_id: str) -> Entity:
        for e in self.entities:
            if e.id == entity_id:
                return e
        raise KeyError(entity_id)


def entities_reachable_via(catalog: Catalog, iface: AccessInterface | str) -> set[Entity]:
    """Entities bound to the interface; raises UnknownInterfaceError if undeclared."""
    iface_id = iface if isinstance(iface, str) else iface.id
    declared = catalog.interface(iface_id)
    by_id = {e.id: e for e in catalog.entities}
    return {by_id[b] for b in declared.binds if b in by_id}


def _duplicates(items: Iterable, kind: str) -> list[Diagnostic]:
    seen: dict[str, object] = {}
    out = []
    for item in items:
        if not item.id or not ID_PATTERN.fullmatch(item.id):
            out.append(error("INVALID_ID", f"{kind} id {item.id!r} is not a valid identifier", *item.pos))
        if item.id in seen:
            out.append(error("DUPLICATE_ID", f"duplicate {kind} id {item.id!r}", *item.pos))
        else:
            seen[item.id] = item
    return out


def validate_model(catalog: Catalog) -> list[Diagnostic]:
    """Referential-integrity and invariant violations, ordered by position then code."""
    diags: list[Diagnostic] = []
    if not catalog.name:
        diags.append(error("EMPTY_NAME", "catalog name must not be empty", *catalog.pos))
    if catalog.version < 1:
        diags.append(error("INVALID_VERSION", f"catalog version must be >= 1, got {catalog.version}", *catalog.pos))
    if not catalog.threats:
        diags.append(warning("EMPTY_CATALOG", "catalog declares no threats", *catalog.pos))

    diags += _duplicates(catalog.interfaces, "interface")
    diags += _duplicates(catalog.entities, "entity")
    diags += _duplicates(catalog.assets, "asset")
    diags += _duplicates(catalog.threats, "threat")

    entity_ids = {e.id for e in catalog.entities}
    interfaces = {i.id: i for i in catalog.interfaces}

    for iface in catalog.interfaces:
        for b in iface.binds:
            if b not in entity_ids:
                diags.append(error("UNRESOLVED_ENTITY", f"interface {iface.id!r} binds unknown entity {b!r}", *iface.pos))
    for link in catalog.links:
        for end in (link.source, link.target):
            if end not in entity_ids:
                diags.append(error("UNRESOLVED_ENTITY", f"link endpoint {end!r} is not a declared entity", *link.pos))
        if link.source == link.target:
            diags.append(error("SELF_LINK", f"entity {link.source!r} links to itself", *link.pos))
    for asset in catalog.assets:
        if asset.entity not in entity_ids:
            diags.append(error("UNRESOLVED_ENTITY", f"asset {asset.id!r} references unknown entity {asset.entity!r}", *asset.pos))

    factors = catalog.factor_table
    for threat in catalog.threats:
        if not threat.actions:
            diags.append(error("MISSING_FIELD", f"threat {threat.id!r} has no action", *threat.pos))
        if not threat.interfaces:
            diags.append(error("MISSING_FIELD", f"threat {threat.id!r} has no interfaces", *threat.pos))
        for expr in threat.interfaces:
            where = expr.pos if expr.pos != NOWHERE else threat.pos
            for ref in expr.mentions():
                if ref not in interfaces:
                    diags.append(error("UNRESOLVED_INTERFACE", f"threat {threat.id!r} uses undeclared interface {ref!r}", *where))
            if expr.on_behalf_of is not None and expr.on_behalf_of == expr.via:
                diags.append(error("SELF_DELEGATION", f"{expr} delegates to itself", *where))
            if expr.indexed and expr.via in interfaces and not interfaces[expr.via].indexed:
                diags.append(error("NOT_INDEXED", f"{expr} used but interface {expr.via!r} is not indexed", *where))
        if threat.category is ThreatCategory.HUMAN:
            human = any(e.indexed or (e.via in interfaces and interfaces[e.via].human_origin) for e in threat.interfaces)
            if not human:
                diags.append(
                    warning("HUMAN_INTERFACE", f"human threat {threat.id!r} uses no indexed or human-origin interface", *threat.pos)
                )
        if threat.potential is not None:
            for factor, level in threat.potential.invalid_levels():
                diags.append(error("UNKNOWN_LEVEL", f"threat {threat.id!r}: {factor} level {level!r} is not defined", *threat.pos))
            if not threat.potential.invalid_levels():
                try:
                    potential_points(threat.potential, factors)
                except UnknownLevelError as exc:
                    diags.append(error("UNKNOWN_LEVEL", f"threat {threat.id!r}: {exc}", *threat.pos))
    return sort_diagnostics(diags)
