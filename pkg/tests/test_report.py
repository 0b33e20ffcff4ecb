from __future__ import annotations

import json

import pytest

from pipeline_threats.engine import aggregate_rows
from pipeline_threats.model import DfdModel, structurally_equal
from pipeline_threats.report import (
    build_report,
    model_from_json,
    render,
    render_matrix_tsv,
    threats_from_json,
)
from pipeline_threats.report.serialize import JSON_SECTIONS, matrix_to_dict
from pipeline_threats.schema import ThreatKind

from conftest import assert_golden


@pytest.fixture(scope="module")
def reference_report(reference_model, knowledge, deviations):
    return build_report(reference_model, knowledge, deviations)


@pytest.fixture(scope="module")
def deployment_report(deployment_model, knowledge, deviations):
    return build_report(deployment_model, knowledge, deviations)


def test_reference_markdown_golden(reference_report):
    assert_golden("reference_report.md", render(reference_report, "markdown").decode("utf-8"))


@pytest.mark.parametrize("fmt", ["text", "markdown", "json"])
def test_rendering_is_repeatable(reference_model, knowledge, deviations, fmt):
    first = render(build_report(reference_model, knowledge, deviations), fmt)
    second = render(build_report(reference_model, knowledge, deviations), fmt)
    assert first == second


def test_threats_carry_catalog_references(reference_report):
    by_kind = {t.kind: t for t in reference_report.threats}
    build = by_kind[ThreatKind.SUBVERTED_BUILD_TOOL]
    assert build.mitigation_refs == ("developer-prudence", "tool-diversity", "reproducible-builds")
    assert "trojan-compiler-1984" in build.incident_refs
    assert set(reference_report.mitigations) == set(by_kind)


def test_case_study_json(deployment_report):
    data = json.loads(render(deployment_report, "json"))
    assert tuple(data) == JSON_SECTIONS
    assert data["summary"] == {"threats": 46, "distinct_threat_rows": 5}
    assert len(data["table3_rows"]) == 5
    assert data["options"]["include_eop"] is False
    assert [d["id"] for d in data["deviations_applied"]] == [
        "case-study-builder-rows",
        "case-study-jenkins-flows",
    ]
    first = data["table3_rows"][0]
    assert (first["group"], first["kind"], first["threat"]) == ("Processes", "server_spoofing", "Server spoofing")
    assert first["mitigations"] == ["TLS certificates"]


def test_json_report_reaggregates_to_the_same_matrix(deployment_report, deployment_model):
    data = json.loads(render(deployment_report, "json"))
    model = model_from_json(data)
    assert structurally_equal(model, deployment_model)
    threats = threats_from_json(data)
    assert threats == list(deployment_report.threats)
    assert matrix_to_dict(aggregate_rows(threats, model)) == data["table4_matrix"]


def test_text_report(reference_report):
    text = render(reference_report, "text").decode("utf-8")
    lines = text.splitlines()
    assert lines[0] == "Threat model: Reference software development pipeline"
    assert lines[2:4] == ["Threats: 64", "Distinct threat rows: 13"]
    assert "Threats and mitigations" in lines
    assert "=" * len("Threat consequences") in lines
    assert all(line == line.rstrip() for line in lines)
    assert lines[-1].startswith("reference-store-read-back: VCS → Integration / Source tampering")


def test_report_without_deviations(deployment_model, knowledge):
    text = render(build_report(deployment_model, knowledge), "text").decode("utf-8")
    title = "Deviations from published tables"
    assert text.endswith(f"{title}\n{'=' * len(title)}\nNone.\n")


def test_empty_model_report(knowledge):
    report = build_report(DfdModel(), knowledge)
    assert report.threats == ()
    assert report.summary_rows == ()
    assert report.aggregation.matrix == ()
    markdown = render(report, "markdown").decode("utf-8")
    assert "- Threats: 0\n" in markdown
    assert "| DFD element | Threat type | Threat | Mitigation |\n| --- | --- | --- | --- |\n\n" in markdown


def test_matrix_tsv(reference_report):
    lines = render_matrix_tsv(reference_report.aggregation).splitlines()
    assert lines[0] == (
        "section\telement\tsource_tampering\tbinary_tampering\timproper_build"
        "\tcontrol_info_tampering\tinfrastructure_tampering"
    )
    assert len(lines) == 1 + len(reference_report.aggregation.matrix)
    assert "Process\tDeployment\t\tS, T, E\t\tS, T, E\tS, T, E" in lines
    assert "Data flow\tPackages and Libraries → Continuous Integration\tT\t\tT\t\t" in lines


def test_unknown_format(reference_report):
    with pytest.raises(ValueError, match="unknown report format"):
        render(reference_report, "html")
