from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True, order=False)
class Diagnostic:
    severity: Severity
    code: str
    message: str
    line: int = 1
    column: int = 1

    @property
    def is_error(self) -> bool:
        return self.severity is Severity.ERROR

    def sort_key(self) -> tuple[int, int, str, str]:
        return (self.line, self.column, self.code, self.message)

    def format(self, filename: str | None = None) -> str:
        where = f"{self.line}:{self.column}"
        if filename:
            where = f"{filename}:{where}"
        return f"{where}: {self.severity.value}[{self.code}]: {self.message}"

    def __str__(self) -> str:
        return self.format()


def error(code: str, message: str, line: int = 1, column: int = 1) -> Diagnostic:
    return Diagnostic(Severity.ERROR, code, message, max(line, 1), max(column, 1))


def warning(code: str, message: str, line: int = 1, column: int = 1) -> Diagnostic:
    return Diagnostic(Severity.WARNING, code, message, max(line, 1), max(column, 1))


def sort_diagnostics(diags) -> list[Diagnostic]:
    return sorted(diags, key=Diagnostic.sort_key)


def has_errors(diags) -> bool:
    return any(d.is_error for d in diags)
