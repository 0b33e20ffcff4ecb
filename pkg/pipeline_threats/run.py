#!/usr/bin/env python3
"""Command line: validate, analyze and diff pipeline models; browse the catalogs."""

from __future__ import annotations

import argparse
import json
import os
import shutil
import sys
from collections.abc import Sequence
from dataclasses import replace
from pathlib import Path
from typing import TextIO

from pipeline_threats.dsl import parse_file
from pipeline_threats.engine import aggregate_rows, enumerate_threats
from pipeline_threats.kb import CatalogError, KnowledgeBase, UnknownStageError, load_knowledge_base
from pipeline_threats.model import DfdModel, Diagnostic
from pipeline_threats.report import (
    FORMATS,
    build_report,
    diff,
    load_deviations,
    render,
    render_matrix_tsv,
)
from pipeline_threats.schema import ThreatKind

PACKAGE_DIR = Path(__file__).resolve().parent
MODELS_DIR = PACKAGE_DIR / "models"

TEMPLATES = {
    "reference": MODELS_DIR / "reference_pipeline.dfd",
    "deployment": MODELS_DIR / "deployment_pipeline.dfd",
}

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_MODEL = 2

# --exclude names -> AnalysisOptions flag switched off
EXCLUDE_OPTIONS = {
    "eop": "include_eop",
    "dependencies": "include_dependency_threats",
    "build-tools": "include_build_tool_threats",
    "entities": "include_entity_threats",
}

SEVERITY_COLORS = {"error": "\033[1;31m", "warning": "\033[1;33m"}
RESET = "\033[0m"


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _use_color(stream: TextIO) -> bool:
    return stream.isatty() and not os.environ.get("NO_COLOR")


def _print_diagnostics(diagnostics: Sequence[Diagnostic], path: Path) -> None:
    color = _use_color(sys.stderr)
    for diagnostic in diagnostics:
        line = diagnostic.format(str(path))
        if color:
            severity = diagnostic.severity
            line = line.replace(
                f"{severity}[", f"{SEVERITY_COLORS[severity]}{severity}{RESET}[", 1
            )
        print(line, file=sys.stderr)


def _write(data: bytes | str) -> None:
    sys.stdout.write(data.decode("utf-8") if isinstance(data, bytes) else data)
    sys.stdout.flush()


def _exclude_list(value: str) -> list[str]:
    names = [v.strip() for v in value.split(",") if v.strip()]
    unknown = [n for n in names if n not in EXCLUDE_OPTIONS]
    if unknown:
        raise argparse.ArgumentTypeError(
            f"unknown exclusion {unknown[0]!r} (expected one of {', '.join(EXCLUDE_OPTIONS)})"
        )
    return names


def _load_model(path: Path) -> DfdModel | int:
    """Parsed model, or the exit code to stop with."""
    if not path.is_file():
        print(f"error: no such file: {path}", file=sys.stderr)
        return EXIT_USAGE
    result = parse_file(path)
    _print_diagnostics(result.errors, path)
    if result.model is None:
        return EXIT_MODEL
    return result.model


def _load_knowledge(data_dir: Path | None) -> KnowledgeBase | int:
    try:
        return load_knowledge_base(data_dir)
    except (CatalogError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def cmd_validate(args: argparse.Namespace) -> int:
    path = Path(args.model)
    if not path.is_file():
        print(f"error: no such file: {path}", file=sys.stderr)
        return EXIT_USAGE
    result = parse_file(path)
    _print_diagnostics(result.diagnostics, path)
    if result.errors:
        return EXIT_MODEL
    if not args.quiet:
        print(f"{path}: ok ({len(result.warnings)} warnings)", file=sys.stderr)
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    model = _load_model(Path(args.model))
    if isinstance(model, int):
        return model
    overrides = {EXCLUDE_OPTIONS[name]: False for name in args.exclude or ()}
    if args.all_stride:
        overrides["integrity_only"] = False
    if args.no_boundary_suppression:
        overrides["boundary_suppression"] = False
    model = replace(model, options=model.options.with_overrides(**overrides))

    knowledge = _load_knowledge(args.data_dir)
    if isinstance(knowledge, int):
        return knowledge
    try:
        deviations = load_deviations(args.data_dir)
    except CatalogError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    report = build_report(model, knowledge, deviations)
    _write(render(report, args.format))
    if not args.quiet:
        print(
            f"✓ {model.name}: {len(report.threats)} threats in "
            f"{len(report.summary_rows)} distinct rows",
            file=sys.stderr,
        )
    return EXIT_OK


def cmd_diff(args: argparse.Namespace) -> int:
    before = _load_model(Path(args.before))
    if isinstance(before, int):
        return before
    after = _load_model(Path(args.after))
    if isinstance(after, int):
        return after
    result = diff(enumerate_threats(before), enumerate_threats(after))
    if args.format == "json":
        _write(json.dumps(result.as_dict(), indent=2, ensure_ascii=False) + "\n")
    else:
        _write("".join(f"{line}\n" for line in result.lines()))
    if result.is_empty and not args.quiet:
        print("no differences", file=sys.stderr)
    return EXIT_OK


def _catalog_lines(knowledge: KnowledgeBase, kind: ThreatKind | None, stage: str | None) -> list[str]:
    lines: list[str] = []
    if stage is None:
        mitigations = knowledge.mitigations if kind is None else knowledge.mitigations_for(kind)
        lines.append("Mitigations")
        for m in mitigations:
            kinds = ", ".join(k.value for k in ThreatKind if k in m.applies_to)
            lines.append(f"  {m.id}: {m.name} [{kinds}]")
        lines.append("")

    incidents = list(knowledge.incidents)
    if kind is not None:
        incidents = [i for i in incidents if kind in i.threat_kinds]
    if stage is not None:
        staged = {i.id for i in knowledge.incidents_for(stage)}
        incidents = [i for i in incidents if i.id in staged]
    lines.append("Incidents")
    for i in incidents:
        lines.append(f"  {i.id} ({i.year}, {i.stage}): {i.name} [{i.citation_key}]")
    return lines


def cmd_catalog(args: argparse.Namespace) -> int:
    kind: ThreatKind | None = None
    if args.threat is not None:
        try:
            kind = ThreatKind(args.threat)
        except ValueError:
            print(
                f"error: unknown threat kind {args.threat!r} "
                f"(expected one of {', '.join(k.value for k in ThreatKind)})",
                file=sys.stderr,
            )
            return EXIT_USAGE
    knowledge = _load_knowledge(args.data_dir)
    if isinstance(knowledge, int):
        return knowledge
    try:
        lines = _catalog_lines(knowledge, kind, args.stage)
    except UnknownStageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _write("".join(f"{line}\n" for line in lines))
    return EXIT_OK


def cmd_init(args: argparse.Namespace) -> int:
    out = Path(args.output)
    if out.exists() and not args.force:
        print(f"error: {out} already exists (use --force to overwrite)", file=sys.stderr)
        return EXIT_USAGE
    out.parent.mkdir(parents=True, exist_ok=True)
    shutil.copyfile(TEMPLATES[args.template], out)
    if not args.quiet:
        print(f"Wrote {args.template} template to {out}", file=sys.stderr)
    return EXIT_OK


def cmd_export_matrix(args: argparse.Namespace) -> int:
    model = _load_model(Path(args.model))
    if isinstance(model, int):
        return model
    tsv = render_matrix_tsv(aggregate_rows(enumerate_threats(model), model))
    if args.output is None:
        _write(tsv)
        return EXIT_OK
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="") as f:
        f.write(tsv)
    if not args.quiet:
        print(f"Wrote {len(tsv.splitlines()) - 1} matrix rows to {out}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="pipeline_threats",
        description="Integrity threat modeling for software development pipelines",
    )
    parser.add_argument(
        "--data-dir",
        type=Path,
        default=None,
        help="Directory holding the catalogs and deviations ledger "
        "(default: $PIPELINE_THREATS_DATA_DIR or the bundled data)",
    )
    parser.add_argument("--quiet", action="store_true", help="Suppress progress messages")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    validate = sub.add_parser("validate", help="Check a .dfd model and print diagnostics")
    validate.add_argument("model", help="Path to a .dfd file")
    validate.set_defaults(handler=cmd_validate)

    analyze = sub.add_parser("analyze", help="Enumerate threats and print a report")
    analyze.add_argument("model", help="Path to a .dfd file")
    analyze.add_argument("--format", choices=FORMATS, default="text")
    analyze.add_argument(
        "--exclude",
        action="extend",
        type=_exclude_list,
        help=f"Comma-separated threat families to skip, repeatable: {', '.join(EXCLUDE_OPTIONS)}",
    )
    analyze.add_argument(
        "--all-stride",
        action="store_true",
        help="Keep information disclosure and denial of service classes",
    )
    analyze.add_argument(
        "--no-boundary-suppression",
        action="store_true",
        help="Treat every flow as crossing a trust boundary",
    )
    analyze.set_defaults(handler=cmd_analyze)

    compare = sub.add_parser("diff", help="Compare the threats of two models")
    compare.add_argument("before")
    compare.add_argument("after")
    compare.add_argument("--format", choices=("text", "json"), default="text")
    compare.set_defaults(handler=cmd_diff)

    catalog = sub.add_parser("catalog", help="List mitigations and documented incidents")
    catalog.add_argument("--threat", default=None, help="Threat kind, e.g. store_tampering")
    catalog.add_argument("--stage", default=None, help="Pipeline stage, e.g. continuous_integration")
    catalog.set_defaults(handler=cmd_catalog)

    init = sub.add_parser("init", help="Write a bundled example model")
    init.add_argument("--template", choices=sorted(TEMPLATES), required=True)
    init.add_argument("--force", action="store_true", help="Overwrite an existing file")
    init.add_argument("output", help="Destination .dfd path")
    init.set_defaults(handler=cmd_init)

    export = sub.add_parser("export-matrix", help="Write the consequence matrix as TSV")
    export.add_argument("model", help="Path to a .dfd file")
    export.add_argument("-o", "--output", default=None, help="TSV path (default: standard output)")
    export.set_defaults(handler=cmd_export_matrix)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    return args.handler(args)


if __name__ == "__main__":
    raise SystemExit(main())
