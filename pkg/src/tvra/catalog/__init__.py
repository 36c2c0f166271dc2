"""Catalog file format: parser, canonical writer, diff, and the built-in
autonomous-vehicle catalog."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources
from pathlib import Path

from ..diagnostics import error
from ..errors import CatalogError
from ..model import Catalog
from .diff import ChangeSet, FieldChange, Modification, diff_catalogs, render_changeset
from .syntax import parse_catalog, tokenize
from .writer import serialize_catalog

BUILTIN_NAME = "av-fullauto.tvra"

__all__ = [
    "BUILTIN_NAME",
    "ChangeSet",
    "FieldChange",
    "Modification",
    "builtin_source",
    "diff_catalogs",
    "load_builtin_catalog",
    "load_catalog",
    "parse_catalog",
    "render_changeset",
    "serialize_catalog",
    "tokenize",
]


def builtin_source() -> str:
    return resources.files(__package__).joinpath("data", BUILTIN_NAME).read_text(encoding="utf-8")


@lru_cache(maxsize=1)
def load_builtin_catalog() -> Catalog:
    return parse_catalog(builtin_source())


def load_catalog(path: str | Path) -> Catalog:
    """Read and parse a catalog file; a missing or unreadable file is reported
    as a FILE_NOT_FOUND / FILE_UNREADABLE diagnostic."""
    try:
        data = Path(path).read_bytes()
    except FileNotFoundError:
        raise CatalogError([error("FILE_NOT_FOUND", f"no such file: {path}")]) from None
    except OSError as exc:
        raise CatalogError([error("FILE_UNREADABLE", f"cannot read {path}: {exc.strerror}")]) from None
    return parse_catalog(data)
