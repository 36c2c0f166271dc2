"""``tvra`` command line: parse -> validate -> assess -> report.

Exit status: 0 success, 1 catalog/validation errors, 2 usage error,
3 declared/computed risk discrepancies under ``--strict``.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence, TextIO

from . import __version__
from .analysis import (
    ExposureReport,
    assess_catalog,
    assessment_warnings,
    consistency_check,
    countermeasure_plan,
    exposure_by_interface,
    reference_points,
)
from .catalog import builtin_source, diff_catalogs, load_catalog, render_changeset
from .diagnostics import Diagnostic, has_errors, sort_diagnostics
from .errors import CatalogError
from .model import Catalog, validate_model
from .report import build_matrix, emit_structured, render_assessments, render_exposure, render_plan, render_text

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_USAGE = 2
EXIT_INCONSISTENT = 3


class _UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str):
        raise _UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _parser() -> argparse.ArgumentParser:
    p = _ArgumentParser(prog="tvra", description="Threat, vulnerability and risk analysis over .tvra catalogs.")
    p.add_argument("--version", action="version", version=f"tvra {__version__}")
    sub = p.add_subparsers(dest="command", metavar="command", parser_class=_ArgumentParser)
    sub.required = True

    s = sub.add_parser("validate", help="report catalog diagnostics")
    s.add_argument("file")

    s = sub.add_parser("assess", help="assess every threat and print the risk matrix")
    s.add_argument("file")
    s.add_argument("--format", choices=("text", "json", "csv"), default="text")
    s.add_argument("--strict", action="store_true", help="exit 3 if a computed class differs from its declared class")

    s = sub.add_parser("matrix", help="print the risk matrix only")
    s.add_argument("file")

    s = sub.add_parser("plan", help="print the countermeasure plan")
    s.add_argument("file")

    s = sub.add_parser("exposure", help="threats per access interface")
    s.add_argument("file")
    s.add_argument("--interface", dest="interface", metavar="ID")

    s = sub.add_parser("diff", help="compare two catalogs")
    s.add_argument("file_a")
    s.add_argument("file_b")

    sub.add_parser("builtin", help="write the built-in autonomous-vehicle catalog")
    return p


def _report(diags: Sequence[Diagnostic], filename: str, err: TextIO) -> None:
    for d in sort_diagnostics(diags):
        err.write(d.format(filename) + "\n")


def _load(path: str, err: TextIO) -> Optional[Catalog]:
    """Parse and validate; print every diagnostic; None if any is an error."""
    try:
        catalog = load_catalog(path)
    except CatalogError as exc:
        _report(exc.diagnostics, path, err)
        return None
    diags = list(catalog.warnings) + validate_model(catalog)
    _report(diags, path, err)
    if has_errors(diags):
        return None
    return catalog


def run(argv: Sequence[str], out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = _parser().parse_args(list(argv))
    except _UsageError as exc:
        err.write(f"{exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return EXIT_OK if not exc.code else EXIT_USAGE

    if args.command == "builtin":
        out.write(builtin_source())
        return EXIT_OK

    if args.command == "diff":
        a, b = _load(args.file_a, err), _load(args.file_b, err)
        if a is None or b is None:
            return EXIT_INVALID
        out.write(render_changeset(diff_catalogs(a, b)))
        return EXIT_OK

    catalog = _load(args.file, err)
    if catalog is None:
        return EXIT_INVALID
    if args.command == "validate":
        return EXIT_OK

    _report(assessment_warnings(catalog), args.file, err)
    assessments = assess_catalog(catalog)

    if args.command == "matrix":
        out.write(render_text(build_matrix(assessments)))
        return EXIT_OK

    if args.command == "plan":
        plan = countermeasure_plan(catalog, assessments)
        for tid in plan.omitted:
            err.write(f"{args.file}: warning[NO_COUNTERMEASURE]: threat {tid!r} has no countermeasure\n")
        out.write(render_plan(plan))
        return EXIT_OK

    if args.command == "exposure":
        report = exposure_by_interface(catalog, assessments)
        if args.interface is not None:
            if args.interface not in reference_points(catalog):
                err.write(f"tvra: error[UNKNOWN_INTERFACE]: interface {args.interface!r} is not declared\n")
                return EXIT_USAGE
            report = ExposureReport(tuple(r for r in report.rows if r.reference == args.interface))
        out.write(render_exposure(report))
        return EXIT_OK

    # assess
    matrix = build_matrix(assessments)
    plan = countermeasure_plan(catalog, assessments)
    if args.format == "text":
        out.write(render_assessments(assessments, catalog))
        out.write("\n")
        out.write(render_text(matrix))
    else:
        out.write(emit_structured(assessments, matrix, plan, args.format, catalog=catalog))

    discrepancies = consistency_check(assessments)
    for d in discrepancies:
        err.write(
            f"{args.file}: warning[RISK_DISCREPANCY]: threat {d.threat_id!r} declared "
            f"{d.declared.keyword}, computed {d.computed.keyword}\n"
        )
    if args.strict and discrepancies:
        return EXIT_INCONSISTENT
    return EXIT_OK


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
