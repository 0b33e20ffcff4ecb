"""Reports, renderers, threat diffs and the deviations ledger."""

from pipeline_threats.report.deviations import (
    Deviation,
    DeviationCell,
    applied_deviations,
    load_deviations,
)
from pipeline_threats.report.diff import DiffEntry, ThreatDiff, diff
from pipeline_threats.report.render import FORMATS, render, render_matrix_tsv
from pipeline_threats.report.report import Report, build_report
from pipeline_threats.report.serialize import model_from_json, threats_from_json

__all__ = [
    "FORMATS",
    "Deviation",
    "DeviationCell",
    "DiffEntry",
    "Report",
    "ThreatDiff",
    "applied_deviations",
    "build_report",
    "diff",
    "load_deviations",
    "model_from_json",
    "render",
    "render_matrix_tsv",
    "threats_from_json",
]
