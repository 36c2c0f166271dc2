from __future__ import annotations

from pathlib import Path

import pytest

from tvra.catalog import load_builtin_catalog

ROOT = Path(__file__).resolve().parents[1]
SHIPPED = ROOT / "catalogs" / "av-fullauto.tvra"
GOLDEN = Path(__file__).resolve().parent / "golden"

_criteria: list[tuple[str, bool, str]] = []

MINIMAL = """\
catalog "mini" version 1

interface B {
  description "roadside"
  binds rsu
}

entity rsu {
  kind rsu
  label "RSU"
}

threat t1 {
  name "one"
  category data
  action "act"
  interfaces B
  objective "obj"
  impact high
  potential { time t1d expertise layman knowledge public opportunity easy equipment standard }
  declared_risk critical
  countermeasure "fix"
}
"""


@pytest.fixture(scope="session")
def builtin():
    return load_builtin_catalog()


@pytest.fixture
def minimal_source() -> str:
    return MINIMAL


@pytest.fixture
def criterion():
    """Record an acceptance criterion outcome; printed in the terminal summary."""

    def record(name: str, ok: bool, detail: str = "") -> None:
        _criteria.append((name, bool(ok), detail))
        assert ok, f"{name}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _criteria:
        line = f"[{'PASS' if ok else 'FAIL'}] {name}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
