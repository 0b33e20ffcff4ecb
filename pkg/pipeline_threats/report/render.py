"""Report renderers: aligned text, markdown tables, json and the TSV matrix export.

Every renderer is a pure function of the report, so the same model and
catalogs always give byte-identical output.
"""

from __future__ import annotations

import csv
import io
import json
from collections.abc import Iterator, Sequence
from typing import Any, Literal

from pipeline_threats.engine import Aggregation
from pipeline_threats.model import AnalysisOptions
from pipeline_threats.report.report import Report
from pipeline_threats.report.serialize import (
    deviation_to_dict,
    matrix_to_dict,
    model_to_dict,
    threat_to_dict,
)
from pipeline_threats.schema import CONSEQUENCE_ORDER

ReportFormat = Literal["text", "markdown", "json"]
FORMATS: tuple[ReportFormat, ...] = ("text", "markdown", "json")

SUMMARY_HEADER = ("DFD element", "Threat type", "Threat", "Mitigation")
MATRIX_HEADER = ("Element type", "Element", *(c.label for c in CONSEQUENCE_ORDER))
MATRIX_TSV_FIELDS = ("section", "element", *(c.value for c in CONSEQUENCE_ORDER))

SUMMARY_TITLE = "Threats and mitigations"
MATRIX_TITLE = "Threat consequences"
DEVIATIONS_TITLE = "Deviations from published tables"


def options_line(options: AnalysisOptions) -> str:
    return ", ".join(f"{name}={str(value).lower()}" for name, value in options.as_dict().items())


def summary_table(report: Report) -> list[tuple[str, ...]]:
    return [
        (
            ", ".join(row.members),
            row.threat_class.value,
            row.label,
            ", ".join(report.mitigation_names(row.kind)),
        )
        for row in report.summary_rows
    ]


def matrix_table(aggregation: Aggregation) -> list[tuple[str, ...]]:
    return [
        (row.section, row.label, *(row.cell(c) for c in CONSEQUENCE_ORDER))
        for row in aggregation.matrix
    ]


def deviation_lines(report: Report) -> Iterator[str]:
    for deviation in report.deviations_applied:
        cells = "; ".join(
            f'{c.row} / {c.consequence.label}: published "{c.paper_value}", '
            f'engine "{c.engine_value}"'
            for c in deviation.cells
        )
        yield f"{deviation.id}: {cells}"


def _headline(report: Report) -> list[str]:
    return [
        f"Options: {options_line(report.options)}",
        f"Threats: {len(report.threats)}",
        f"Distinct threat rows: {len(report.summary_rows)}",
    ]


# markdown


def _md_row(cells: Sequence[str]) -> str:
    return "| " + " | ".join(c.replace("|", "\\|") for c in cells) + " |"


def _md_table(header: Sequence[str], rows: Sequence[Sequence[str]]) -> list[str]:
    lines = [_md_row(header), _md_row(["---"] * len(header))]
    lines.extend(_md_row(row) for row in rows)
    return lines


def render_markdown(report: Report) -> str:
    lines = [f"# Threat model: {report.model.name}", ""]
    lines.extend(f"- {item}" for item in _headline(report))
    lines += ["", f"## {SUMMARY_TITLE}", ""]
    lines.extend(_md_table(SUMMARY_HEADER, summary_table(report)))
    lines += ["", f"## {MATRIX_TITLE}", ""]
    lines.extend(_md_table(MATRIX_HEADER, matrix_table(report.aggregation)))
    lines += ["", f"## {DEVIATIONS_TITLE}", ""]
    deviations = [f"- {line}" for line in deviation_lines(report)]
    lines.extend(deviations or ["None."])
    return "\n".join(lines) + "\n"


# text


def _aligned(header: Sequence[str], rows: Sequence[Sequence[str]]) -> list[str]:
    widths = [len(h) for h in header]
    for row in rows:
        widths = [max(w, len(c)) for w, c in zip(widths, row)]

    def line(cells: Sequence[str]) -> str:
        return "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()

    return [line(header), line(["-" * w for w in widths]), *(line(r) for r in rows)]


def _title(text: str) -> list[str]:
    return [text, "=" * len(text)]


def render_text(report: Report) -> str:
    lines = [f"Threat model: {report.model.name}", *_headline(report), ""]
    lines += _title(SUMMARY_TITLE)
    lines.extend(_aligned(SUMMARY_HEADER, summary_table(report)))
    lines += ["", *_title(MATRIX_TITLE)]
    lines.extend(_aligned(MATRIX_HEADER, matrix_table(report.aggregation)))
    lines += ["", *_title(DEVIATIONS_TITLE)]
    lines.extend(list(deviation_lines(report)) or ["None."])
    return "\n".join(lines) + "\n"


# json


def report_to_dict(report: Report) -> dict[str, Any]:
    return {
        "model": model_to_dict(report.model),
        "options": report.options.as_dict(),
        "threats": [threat_to_dict(t) for t in report.threats],
        "table3_rows": [
            {
                "group": row.group,
                "threat_class": row.threat_class.value,
                "kind": row.kind.value,
                "variant": row.variant,
                "threat": row.label,
                "members": list(row.members),
                "mitigations": report.mitigation_names(row.kind),
            }
            for row in report.summary_rows
        ],
        "table4_matrix": matrix_to_dict(report.aggregation),
        "deviations_applied": [deviation_to_dict(d) for d in report.deviations_applied],
        "summary": {
            "threats": len(report.threats),
            "distinct_threat_rows": len(report.summary_rows),
        },
    }


def render_json(report: Report) -> str:
    return json.dumps(report_to_dict(report), indent=2, ensure_ascii=False) + "\n"


RENDERERS = {
    "text": render_text,
    "markdown": render_markdown,
    "json": render_json,
}


def render(report: Report, fmt: ReportFormat = "text") -> bytes:
    try:
        renderer = RENDERERS[fmt]
    except KeyError:
        raise ValueError(f"unknown report format {fmt!r} (expected one of {', '.join(FORMATS)})") from None
    return renderer(report).encode("utf-8")


def render_matrix_tsv(aggregation: Aggregation) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(
        buffer, fieldnames=MATRIX_TSV_FIELDS, delimiter="\t", lineterminator="\n"
    )
    writer.writeheader()
    for row in aggregation.matrix:
        writer.writerow(
            {
                "section": row.section,
                "element": row.label,
                **{c.value: row.cell(c) for c in CONSEQUENCE_ORDER},
            }
        )
    return buffer.getvalue()
