from __future__ import annotations


class TvraError(Exception):
    code = "TVRA_ERROR"


class UnknownLevelError(TvraError, KeyError):
    code = "UNKNOWN_LEVEL"

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else self.code


class InvalidRiskValueError(TvraError, ValueError):
    code = "INVALID_RISK_VALUE"


class UnknownInterfaceError(TvraError, KeyError):
    code = "UNKNOWN_INTERFACE"

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else self.code


class UnsupportedFormatError(TvraError, ValueError):
    code = "UNSUPPORTED_FORMAT"


class CatalogError(TvraError):
    """A catalog failed to parse or validate; ``diagnostics`` holds every finding."""

    code = "CATALOG_ERROR"

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        errors = [d for d in self.diagnostics if d.is_error]
        head = str(errors[0]) if errors else "invalid catalog"
        more = f" (+{len(errors) - 1} more)" if len(errors) > 1 else ""
        super().__init__(head + more)
