"""Lexer and recursive-descent parser for ``.tvra`` catalog files.

Errors never abort the parse. A bad field value skips to the next field
keyword of the enclosing block; a bad block header skips to the next
top-level keyword that starts a line. A top-level keyword found in column 1
while a block is still open closes that block (missing ``}``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from ..diagnostics import Diagnostic, error, has_errors, sort_diagnostics, warning
from ..errors import CatalogError
from ..model import (
    AccessInterface,
    Asset,
    AssetClass,
    Catalog,
    Entity,
    EntityKind,
    InterfaceExpr,
    Link,
    LinkKind,
    SecurityService,
    Threat,
    ThreatCategory,
)
from ..scoring import (
    FACTORS,
    LEVELS,
    AttackPotential,
    BandTable,
    FactorTable,
    Impact,
    RiskClass,
    VulnerabilityRating,
)

IDENT, INT, STRING, LBRACE, RBRACE, COMMA, ARROW, AT, INDEX, EOF = (
    "identifier",
    "integer",
    "string",
    "'{'",
    "'}'",
    "','",
    "'->'",
    "'@'",
    "'[*]'",
    "end of file",
)

TOP_KEYWORDS = frozenset(
    {"catalog", "assumption", "interface", "entity", "link", "asset", "threat", "factors", "bands"}
)

RISK_LABELS = ("minor", "major", "critical", "low")


@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    line: int
    column: int

    def describe(self) -> str:
        if self.kind in (IDENT, INT):
            return f"{self.kind} {self.value!r}"
        if self.kind == STRING:
            return "string"
        return self.kind


def _is_ident_start(ch: str) -> bool:
    return ch.isascii() and ch.isalpha()


def _is_ident_char(ch: str) -> bool:
    return ch.isascii() and (ch.isalnum() or ch == "_")


def tokenize(source: str) -> tuple[list[Token], list[Diagnostic]]:
    tokens: list[Token] = []
    diags: list[Diagnostic] = []
    i, line, col = 0, 1, 1
    n = len(source)

    while i < n:
        ch = source[i]
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if ch in " \t\r":
            i, col = i + 1, col + 1
            continue
        if ch == "#":
            while i < n and source[i] != "\n":
                i += 1
            continue
        start_col = col
        if ch == '"':
            i, col = i + 1, col + 1
            buf = []
            closed = False
            while i < n and source[i] != "\n":
                c = source[i]
                if c == '"':
                    i, col = i + 1, col + 1
                    closed = True
                    break
                if c == "\\":
                    nxt = source[i + 1] if i + 1 < n else ""
                    if nxt in ('"', "\\"):
                        buf.append(nxt)
                        i, col = i + 2, col + 2
                        continue
                    diags.append(error("INVALID_ESCAPE", f"invalid escape sequence '\\{nxt}'", line, col))
                    i, col = i + 1, col + 1
                    continue
                buf.append(c)
                i, col = i + 1, col + 1
            if not closed:
                diags.append(error("UNTERMINATED_STRING", "string is not closed before end of line", line, start_col))
            tokens.append(Token(STRING, "".join(buf), line, start_col))
            continue
        if _is_ident_start(ch):
            j = i + 1
            while j < n and (_is_ident_char(source[j]) or (source[j] == "-" and source[j + 1 : j + 2] != ">")):
                j += 1
            tokens.append(Token(IDENT, source[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isascii() and ch.isdigit():
            j = i + 1
            while j < n and source[j].isascii() and source[j].isdigit():
                j += 1
            tokens.append(Token(INT, source[i:j], line, col))
            col += j - i
            i = j
            continue
        if source.startswith("->", i):
            tokens.append(Token(ARROW, "->", line, col))
            i, col = i + 2, col + 2
            continue
        if source.startswith("[*]", i):
            tokens.append(Token(INDEX, "[*]", line, col))
            i, col = i + 3, col + 3
            continue
        simple = {"{": LBRACE, "}": RBRACE, ",": COMMA, "@": AT}
        if ch in simple:
            tokens.append(Token(simple[ch], ch, line, col))
            i, col = i + 1, col + 1
            continue
        j = i + 1
        while j < n and not (source[j].isspace() or _is_ident_start(source[j]) or source[j] in '"#{},@[-' or source[j].isdigit()):
            j += 1
        bad = source[i:j]
        what = f"character {bad!r}" if len(bad) == 1 else f"characters {bad!r}"
        diags.append(error("INVALID_CHARACTER", f"unexpected {what}", line, col))
        col += j - i
        i = j

    tokens.append(Token(EOF, "", line, col))
    return tokens, diags


class _Sync(Exception):
    """Raised after a diagnostic has been recorded; unwinds to a recovery point."""


_MISSING = object()


class _Parser:
    def __init__(self, tokens: list[Token], diags: list[Diagnostic]):
        self.tokens = tokens
        self.i = 0
        self.diags = diags

    # token helpers

    def peek(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind != EOF:
            self.i += 1
        return tok

    def error(self, code: str, message: str, tok: Token) -> None:
        self.diags.append(error(code, message, tok.line, tok.column))

    def expect(self, kind: str, what: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            self.error("UNEXPECTED_TOKEN", f"expected {what}, found {tok.describe()}", tok)
            raise _Sync
        return self.advance()

    def error_count(self) -> int:
        return sum(d.is_error for d in self.diags)

    @staticmethod
    def starts_statement(tok: Token) -> bool:
        return tok.kind == IDENT and tok.column == 1 and tok.value in TOP_KEYWORDS

    def sync_top(self) -> None:
        self.advance()
        while self.peek().kind != EOF and not self.starts_statement(self.peek()):
            self.advance()

    # values

    def string(self) -> str:
        return self.expect(STRING, "a quoted string").value

    def ident(self, what: str = "an identifier") -> str:
        return self.expect(IDENT, what).value

    def integer(self) -> int:
        return int(self.expect(INT, "an integer").value)

    def keyword(self, choices: tuple[str, ...], what: str) -> str:
        tok = self.expect(IDENT, what)
        if tok.value not in choices:
            self.error("INVALID_VALUE", f"invalid {what} {tok.value!r}; expected one of: {', '.join(choices)}", tok)
            raise _Sync
        return tok.value

    def ident_list(self, what: str) -> list[str]:
        items = [self.ident(what)]
        while self.peek().kind == COMMA:
            self.advance()
            items.append(self.ident(what))
        return items

    def keyword_list(self, choices: tuple[str, ...], what: str) -> list[str]:
        items = [self.keyword(choices, what)]
        while self.peek().kind == COMMA:
            self.advance()
            items.append(self.keyword(choices, what))
        return items

    def interface_expr(self) -> InterfaceExpr:
        tok = self.expect(IDENT, "an interface id")
        pos = (tok.line, tok.column)
        if self.peek().kind == INDEX:
            self.advance()
            return InterfaceExpr(tok.value, None, True, pos=pos)
        if self.peek().kind == AT:
            self.advance()
            other = self.ident("an interface id after '@'")
            return InterfaceExpr(tok.value, other, False, pos=pos)
        return InterfaceExpr(tok.value, pos=pos)

    def interface_list(self) -> list[InterfaceExpr]:
        items = [self.interface_expr()]
        while self.peek().kind == COMMA:
            self.advance()
            items.append(self.interface_expr())
        return items

    def boolean(self) -> bool:
        return self.keyword(("true", "false"), "boolean") == "true"

    # blocks

    def block(
        self,
        opener: Token,
        fields: dict[str, Callable[[], object]],
        repeatable: frozenset[str] = frozenset(),
    ) -> dict[str, object]:
        """Parse ``{ field value ... }``; values for repeatable fields are lists."""
        self.expect(LBRACE, f"'{{' after {opener.value}")
        values: dict[str, object] = {name: [] for name in repeatable}
        while True:
            tok = self.peek()
            if tok.kind == RBRACE:
                self.advance()
                return values
            if tok.kind == EOF:
                self.error("UNEXPECTED_EOF", f"block opened at line {opener.line} is not closed", tok)
                return values
            if self.starts_statement(tok):
                self.error("MISSING_BRACE", f"missing '}}' for block opened at line {opener.line}", tok)
                return values
            if tok.kind != IDENT or tok.value not in fields:
                if tok.kind == IDENT:
                    self.error("UNKNOWN_FIELD", f"unknown field {tok.value!r} in {opener.value} block", tok)
                else:
                    self.error("UNEXPECTED_TOKEN", f"expected a field name, found {tok.describe()}", tok)
                self.advance()
                self.skip_field(fields)
                continue
            self.advance()
            try:
                value = fields[tok.value]()
            except _Sync:
                self.skip_field(fields)
                if tok.value not in repeatable:
                    values.setdefault(tok.value, _MISSING)
                continue
            if tok.value in repeatable:
                values[tok.value].append(value)
            elif tok.value in values:
                self.error("DUPLICATE_FIELD", f"field {tok.value!r} given more than once", tok)
            else:
                values[tok.value] = value

    def skip_field(self, fields) -> None:
        """Skip the rest of a bad field: stop at the next known field name,
        an identifier opening a new line, or the enclosing ``}``."""
        depth = 0
        while True:
            tok = self.peek()
            if tok.kind == EOF or self.starts_statement(tok):
                return
            prev = self.tokens[self.i - 1] if self.i else None
            if depth == 0 and tok.kind == IDENT and prev is not None and prev.line < tok.line and prev.kind != COMMA:
                return
            if tok.kind == LBRACE:
                depth += 1
            elif tok.kind == RBRACE:
                if depth == 0:
                    return
                depth -= 1
            elif depth == 0 and tok.kind == IDENT and tok.value in fields:
                return
            self.advance()

    def require(self, values: dict, names: tuple[str, ...], opener: Token, label: str) -> bool:
        ok = True
        for name in names:
            if name not in values:
                self.error("MISSING_FIELD", f"{label} is missing required field {name!r}", opener)
                ok = False
            elif values[name] is _MISSING:
                ok = False
        return ok

    def pairs(self) -> list[tuple[Token, int]]:
        """``{ key INT key INT ... }``"""
        self.expect(LBRACE, "'{'")
        out = []
        try:
            while self.peek().kind not in (RBRACE, EOF) and not self.starts_statement(self.peek()):
                key = self.expect(IDENT, "a level name")
                out.append((key, self.integer()))
            self.expect(RBRACE, "'}'")
        except _Sync:
            while self.peek().kind not in (RBRACE, EOF) and not self.starts_statement(self.peek()):
                self.advance()
            if self.peek().kind == RBRACE:
                self.advance()
            raise
        return out


class CatalogParser(_Parser):
    def __init__(self, tokens, diags):
        super().__init__(tokens, diags)
        self.header: Optional[tuple[str, int, Token]] = None
        self.assumptions: list[str] = []
        self.interfaces: list[AccessInterface] = []
        self.entities: list[Entity] = []
        self.links: list[Link] = []
        self.assets: list[Asset] = []
        self.threats: list[Threat] = []
        self.factors: Optional[FactorTable] = None
        self.bands: Optional[BandTable] = None
        self.seen_blocks: set[str] = set()

    def parse(self) -> Optional[Catalog]:
        while self.peek().kind != EOF:
            tok = self.peek()
            handler = getattr(self, f"stmt_{tok.value}", None) if tok.kind == IDENT else None
            if handler is None or tok.value not in TOP_KEYWORDS:
                self.error("UNEXPECTED_TOKEN", f"expected a declaration, found {tok.describe()}", tok)
                self.sync_top()
                continue
            self.advance()
            try:
                handler(tok)
            except _Sync:
                self.sync_top()

        if self.header is None:
            first = self.tokens[0]
            self.error("MISSING_HEADER", 'missing `catalog "<name>" version <n>` declaration', first)
            return None
        name, version, tok = self.header
        return Catalog(
            name=name,
            version=version,
            assumptions=self.assumptions,
            interfaces=self.interfaces,
            entities=self.entities,
            links=self.links,
            assets=self.assets,
            threats=self.threats,
            factor_table_override=self.factors,
            band_table_override=self.bands,
            pos=(tok.line, tok.column),
        )

    def stmt_catalog(self, tok: Token) -> None:
        name = self.string()
        self.keyword(("version",), "keyword 'version'")
        version = self.integer()
        if self.header is not None:
            self.error("DUPLICATE_HEADER", f"catalog header already given at line {self.header[2].line}", tok)
            return
        self.header = (name, version, tok)

    def stmt_assumption(self, tok: Token) -> None:
        self.assumptions.append(self.string())

    def stmt_interface(self, tok: Token) -> None:
        ident = self.ident("an interface id")
        before = self.error_count()
        v = self.block(tok, {"description": self.string, "indexed": self.boolean, "binds": lambda: self.ident_list("an entity id")})
        if self.error_count() != before or not self.require(v, ("description",), tok, f"interface {ident!r}"):
            return
        self.interfaces.append(
            AccessInterface(ident, v["description"], v.get("indexed", False), tuple(v.get("binds", ())), pos=(tok.line, tok.column))
        )

    def stmt_entity(self, tok: Token) -> None:
        ident = self.ident("an entity id")
        before = self.error_count()
        v = self.block(tok, {"kind": lambda: self.keyword(EntityKind.keywords(), "entity kind"), "label": self.string})
        if self.error_count() != before or not self.require(v, ("kind",), tok, f"entity {ident!r}"):
            return
        self.entities.append(Entity(ident, EntityKind.from_keyword(v["kind"]), v.get("label", ""), pos=(tok.line, tok.column)))

    def stmt_link(self, tok: Token) -> None:
        source = self.ident("an entity id")
        self.expect(ARROW, "'->'")
        target = self.ident("an entity id")
        self.keyword(("kind",), "keyword 'kind'")
        kind = self.keyword(LinkKind.keywords(), "link kind")
        self.links.append(Link(source, target, LinkKind.from_keyword(kind), pos=(tok.line, tok.column)))

    def stmt_asset(self, tok: Token) -> None:
        ident = self.ident("an asset id")
        before = self.error_count()
        v = self.block(
            tok,
            {
                "class": lambda: self.keyword(AssetClass.keywords(), "asset class"),
                "entity": lambda: self.ident("an entity id"),
                "description": self.string,
            },
        )
        if self.error_count() != before or not self.require(v, ("class", "entity"), tok, f"asset {ident!r}"):
            return
        self.assets.append(
            Asset(ident, AssetClass.from_keyword(v["class"]), v["entity"], v.get("description", ""), pos=(tok.line, tok.column))
        )

    def potential(self) -> AttackPotential:
        opener = self.tokens[self.i - 1]
        before = self.error_count()
        v = self.block(opener, {f: (lambda f=f: self.keyword(LEVELS[f], f"{f} level")) for f in FACTORS})
        if self.error_count() != before or not self.require(v, FACTORS, opener, "attack potential"):
            raise _Sync
        return AttackPotential(**v)

    def stmt_threat(self, tok: Token) -> None:
        ident = self.ident("a threat id")
        before = self.error_count()
        risk_tok: list[Token] = []

        def declared() -> str:
            risk_tok.append(self.peek())
            return self.keyword(RISK_LABELS, "risk class")

        v = self.block(
            tok,
            {
                "name": self.string,
                "category": lambda: self.keyword(ThreatCategory.keywords(), "threat category"),
                "group": lambda: self.ident("a group id"),
                "action": self.string,
                "interfaces": self.interface_list,
                "objective": self.string,
                "violates": lambda: self.keyword_list(SecurityService.keywords(), "security service"),
                "impact": lambda: self.keyword(("low", "medium", "high"), "impact"),
                "potential": self.potential,
                "declared_risk": declared,
                "countermeasure": self.string,
            },
            repeatable=frozenset({"action", "countermeasure"}),
        )
        label = f"threat {ident!r}"
        required = ("name", "category", "interfaces", "objective", "impact")
        ok = self.require(v, required, tok, label)
        if not v["action"]:
            self.error("MISSING_FIELD", f"{label} is missing required field 'action'", tok)
            ok = False
        if not ok or self.error_count() != before:
            return
        declared_risk = None
        if "declared_risk" in v:
            word = v["declared_risk"]
            if word == "low":
                rt = risk_tok[-1]
                self.diags.append(
                    warning("NORMALIZED_RISK_LABEL", f"{label}: risk label 'low' normalized to 'minor'", rt.line, rt.column)
                )
                word = "minor"
            declared_risk = RiskClass.from_keyword(word)
        self.threats.append(
            Threat(
                id=ident,
                name=v["name"],
                category=ThreatCategory.from_keyword(v["category"]),
                actions=tuple(v["action"]),
                interfaces=tuple(v["interfaces"]),
                objective=v["objective"],
                impact=Impact.from_keyword(v["impact"]),
                violates=tuple(SecurityService.from_keyword(s) for s in v.get("violates", ())),
                potential=v.get("potential"),
                declared_risk=declared_risk,
                countermeasures=tuple(v["countermeasure"]),
                group=v.get("group"),
                pos=(tok.line, tok.column),
            )
        )

    def stmt_factors(self, tok: Token) -> None:
        before = self.error_count()
        v = self.block(tok, {f: self.pairs for f in FACTORS})
        if self.error_count() != before:
            return
        if "factors" in self.seen_blocks:
            self.error("DUPLICATE_BLOCK", "factors block given more than once", tok)
            return
        self.seen_blocks.add("factors")
        tables = {}
        for f in FACTORS:
            entries = v.get(f, [])
            table = {}
            for key, pts in entries:
                if key.value in table:
                    self.error("DUPLICATE_FIELD", f"{f} level {key.value!r} given more than once", key)
                    return
                table[key.value] = pts
            tables[f] = table
        try:
            self.factors = FactorTable(**tables)
        except ValueError as exc:
            self.error("INVALID_FACTOR_TABLE", str(exc), tok)

    def stmt_bands(self, tok: Token) -> None:
        before = self.error_count()
        entries = self.pairs()
        if self.error_count() != before:
            return
        if "bands" in self.seen_blocks:
            self.error("DUPLICATE_BLOCK", "bands block given more than once", tok)
            return
        self.seen_blocks.add("bands")
        rows = []
        for key, bound in entries:
            try:
                rows.append((bound, VulnerabilityRating.from_keyword(key.value)))
            except ValueError:
                choices = ", ".join(r.keyword for r in VulnerabilityRating)
                self.error("INVALID_VALUE", f"invalid rating {key.value!r}; expected one of: {choices}", key)
                return
        try:
            self.bands = BandTable(tuple(sorted(rows)))
        except ValueError as exc:
            self.error("INVALID_BAND_TABLE", str(exc), tok)


def parse_catalog(source: str | bytes) -> Catalog:
    """Parse catalog text.

    Raises CatalogError carrying every diagnostic when the text has errors.
    Warnings from a successful parse are kept on ``Catalog.warnings``.
    """
    if isinstance(source, bytes):
        try:
            source = source.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise CatalogError([error("ENCODING_ERROR", f"source is not valid UTF-8: {exc.reason}")]) from None
    if source.startswith("\ufeff"):
        source = source[1:]
    tokens, diags = tokenize(source)
    if len(tokens) == 1 and not diags:
        raise CatalogError([error("EMPTY_SOURCE", "catalog source is empty")])
    parser = CatalogParser(tokens, diags)
    catalog = parser.parse()
    diags = sort_diagnostics(parser.diags)
    if has_errors(diags) or catalog is None:
        raise CatalogError(diags)
    return Catalog(
        **{f: getattr(catalog, f) for f in catalog.__dataclass_fields__ if f != "warnings"},
        warnings=tuple(diags),
    )
