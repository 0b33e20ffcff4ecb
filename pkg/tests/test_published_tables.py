"""The bundled models against the published threat tables.

Engine matrices are pinned cell by cell. The published matrices differ from
them only in the cells listed in the deviations ledger.
"""

from __future__ import annotations

import pytest

from pipeline_threats.engine import aggregate_rows, enumerate_threats
from pipeline_threats.report import build_report
from pipeline_threats.schema import ConsequenceClass, ThreatKind

SOURCE, BINARY, BUILD, CONTROL, INFRA = tuple(ConsequenceClass)


def row(src: str = "", binary: str = "", build: str = "", control: str = "", infra: str = "") -> dict:
    return {SOURCE: src, BINARY: binary, BUILD: build, CONTROL: control, INFRA: infra}


def as_published(matrix: dict, deviations) -> dict:
    published = {label: dict(cells) for label, cells in matrix.items()}
    for deviation in deviations:
        for cell in deviation.cells:
            published[cell.row][cell.consequence] = cell.paper_value
    return published


STE = "S, T, E"
ST = "S, T"

ENGINE_REFERENCE = {
    "Developer": row(src="S, R"),
    "Packages and Libraries": row(),
    "Tester": row(control="S, R"),
    "DevOps Engineer": row(control="S, R", infra="S, R"),
    "User": row(),
    "Integration": row(src=STE),
    "Continuous Integration": row(src="T", binary=STE, build=STE),
    "Test": row(control=STE),
    "Deployment": row(binary=STE, control=STE, infra=STE),
    "Release": row(binary=STE),
    "Download/App Server": row(binary=STE),
    "Developer → Integration": row(src="T"),
    "Integration → VCS": row(src="T"),
    "VCS → Integration": row(src="T"),
    "VCS → Continuous Integration": row(src="T"),
    "Packages and Libraries → Continuous Integration": row(src="T", build="T"),
    "Continuous Integration → Artifact Repository": row(binary="T"),
    "Artifact Repository → Test": row(control="T"),
    "Test → Tester": row(control="T"),
    "Tester → Test": row(control="T"),
    "Test → Artifact Repository": row(control="T"),
    "DevOps Engineer → Infrastructure Repository": row(control="T", infra="T"),
    "Infrastructure Repository → Test": row(control="T"),
    "Infrastructure Repository → Deployment": row(infra="T"),
    "Artifact Repository → Deployment": row(binary="T"),
    "Deployment → Artifact Repository": row(control="T"),
    "Deployment → Web Server/App Store": row(binary="T"),
    "Web Server/App Store → Release": row(binary="T"),
    "Release → Binary Repository": row(binary="T"),
    "Binary Repository → Download/App Server": row(binary="T"),
    "Download/App Server → User": row(binary="T"),
    "VCS": row(src="T"),
    "Artifact Repository": row(binary="T", control="T"),
    "Infrastructure Repository": row(control="T", infra="T"),
    "Web Server/App Store": row(binary="T"),
    "Binary Repository": row(binary="T"),
}

PUBLISHED_REFERENCE = {
    **ENGINE_REFERENCE,
    "Deployment": row(binary=STE, control="E", infra=STE),
    "VCS → Integration": row(),
    "Artifact Repository → Test": row(),
}

ENGINE_CASE_STUDY = {
    "User": row(),
    "Code Retriever": row(src=ST),
    "Artifact Builder": row(src="T", binary=ST),
    "Image Builder": row(binary=ST),
    "Image Verifier": row(binary=ST),
    "Image Archiver": row(binary=ST),
    "Deployer": row(binary=ST, control=ST, infra=ST),
    "AWS OpsWorks": row(binary="T", control=ST, infra="T"),
    "Test": row(control=ST),
    "Download/App Server": row(binary=ST),
    "Application Code storage → Code Retriever": row(src="T"),
    "Code Retriever → Artifact Builder": row(src="T"),
    "Artifact Builder → Image Builder": row(binary="T"),
    "Image Builder → Image Verifier": row(binary="T"),
    "Image Verifier → Image Archiver": row(binary="T"),
    "Image Archiver → Image Storage": row(binary="T"),
    "Image Storage → Deployer": row(binary="T", control="T", infra="T"),
    "Deployer → AWS OpsWorks": row(binary="T", control="T"),
    "Image Storage → AWS OpsWorks": row(binary="T", control="T", infra="T"),
    "Image Storage → Test": row(control="T"),
    "Test → Image Storage": row(control="T"),
    "AWS OpsWorks → Image Storage": row(control="T"),
    "AWS OpsWorks → Binary Repository": row(),
    "Binary Repository → Download/App Server": row(),
    "Download/App Server → User": row(binary="T"),
    "Application Code storage": row(src="T"),
    "Image Storage": row(binary="T", control="T", infra="T"),
    "Binary Repository": row(),
}

PUBLISHED_CASE_STUDY = {
    **ENGINE_CASE_STUDY,
    "Artifact Builder": row(src=ST, binary="T"),
    "Image Verifier": row(),
    "Code Retriever → Artifact Builder": row(),
    "Artifact Builder → Image Builder": row(),
    "Image Builder → Image Verifier": row(),
    "Image Verifier → Image Archiver": row(),
    "Deployer → AWS OpsWorks": row(binary="T"),
    "Download/App Server → User": row(),
}

CASES = {
    "reference": (ENGINE_REFERENCE, PUBLISHED_REFERENCE, {"deployment-control-info", "reference-store-read-back"}),
    "deployment": (
        ENGINE_CASE_STUDY,
        PUBLISHED_CASE_STUDY,
        {"case-study-builder-rows", "case-study-jenkins-flows"},
    ),
}

REFERENCE_PROCESSES = (
    "Integration",
    "Continuous Integration",
    "Test",
    "Deployment",
    "Release",
    "Download/App Server",
)

# (group, kind, variant, members, mitigations)
REFERENCE_ROWS = [
    ("External entities", "user_spoofing", None, ("Developer", "Tester", "DevOps Engineer"),
     ["Authentication", "Account management"]),
    ("External entities", "entity_repudiation", None, ("Developer", "Tester", "DevOps Engineer"),
     ["Logging", "Commit signing"]),
    ("Processes", "server_spoofing", None, REFERENCE_PROCESSES, ["TLS certificates"]),
    ("Processes", "unreliable_input", None, REFERENCE_PROCESSES,
     ["Permissions", "Digital signatures", "Software assurance tools"]),
    ("Processes", "local_falsification", None, REFERENCE_PROCESSES, ["Intrusion tolerance techniques"]),
    ("Processes", "elevation_of_privilege", "system_data",
     ("Continuous Integration", "Deployment", "Release", "Download/App Server"),
     ["Authentication", "Minimal privilege", "Intrusion tolerance techniques"]),
    ("Processes", "elevation_of_privilege", "entity_functionality", ("Integration", "Test"),
     ["Authentication", "Minimal privilege", "Intrusion tolerance techniques"]),
    ("Continuous integration", "subverted_build_tool", None, ("Continuous Integration",),
     ["Developer prudence", "Tool diversity", "Reproducible builds"]),
    ("Continuous integration", "untrusted_dependency", None, ("Continuous Integration",),
     ["HTTPS connections", "Digital signatures", "Repository diversity"]),
    ("Continuous integration", "dependency_confusion", None, ("Continuous Integration",),
     ["Unique version identifiers for each release"]),
    ("Data flows", "flow_tampering", None,
     tuple(label for label in ENGINE_REFERENCE if " → " in label), ["TLS cryptography or equivalent"]),
    ("Entity-originated flows", "malicious_client_tool", None,
     ("Developer → Integration", "Tester → Test", "DevOps Engineer → Infrastructure Repository"),
     ["Software assurance tools", "Independent code review"]),
    ("Data stores", "store_tampering", None,
     ("VCS", "Artifact Repository", "Infrastructure Repository", "Web Server/App Store", "Binary Repository"),
     ["Permission management", "Data-at-rest encryption"]),
]

CASE_STUDY_PROCESSES = (
    "Code Retriever",
    "Artifact Builder",
    "Image Builder",
    "Image Verifier",
    "Image Archiver",
    "Deployer",
    "AWS OpsWorks",
    "Test",
    "Download/App Server",
)

CASE_STUDY_ROWS = [
    ("Processes", "server_spoofing", None, CASE_STUDY_PROCESSES),
    ("Processes", "unreliable_input", None, CASE_STUDY_PROCESSES[:-1]),
    ("Processes", "local_falsification", None, CASE_STUDY_PROCESSES),
    ("Data flows", "flow_tampering", None,
     tuple(label for label, cells in ENGINE_CASE_STUDY.items() if " → " in label and any(cells.values()))),
    ("Data stores", "store_tampering", None, ("Application Code storage", "Image Storage")),
]


@pytest.fixture(params=sorted(CASES))
def bundled(request, reference_model, deployment_model):
    model = reference_model if request.param == "reference" else deployment_model
    return model, *CASES[request.param]


def test_engine_matrix(bundled):
    model, engine, _, _ = bundled
    matrix = aggregate_rows(enumerate_threats(model), model).matrix_by_label()
    assert list(matrix) == list(engine)
    assert matrix == engine


def test_matrix_rows_follow_model_order(reference_model):
    matrix = aggregate_rows(enumerate_threats(reference_model), reference_model).matrix
    sections = [r.section for r in matrix]
    assert sections == ["External entity"] * 5 + ["Process"] * 6 + ["Data flow"] * 20 + ["Data store"] * 5


def test_deviations_restore_the_published_matrix(bundled, knowledge, deviations):
    model, engine, published, expected_ids = bundled
    report = build_report(model, knowledge, deviations)
    assert {d.id for d in report.deviations_applied} == expected_ids
    assert as_published(report.aggregation.matrix_by_label(), report.deviations_applied) == published


def test_deviation_ledger_is_small_and_exact(deviations):
    assert len(deviations) == 4
    for deviation in deviations:
        assert deviation.table == "consequence-matrix"
        assert deviation.quotes and deviation.justification
        for cell in deviation.cells:
            assert cell.paper_value != cell.engine_value


def test_deviation_stops_applying_when_the_engine_changes(reference_model, knowledge, deviations):
    report = build_report(reference_model, knowledge, deviations)
    matrix = report.aggregation.matrix_by_label()
    matrix["Deployment"] = {**matrix["Deployment"], CONTROL: "E"}
    still = {d.id for d in deviations if d.applies_to(reference_model.name, matrix)}
    assert still == {"reference-store-read-back"}


def test_reference_summary_rows(reference_model, knowledge):
    report = build_report(reference_model, knowledge)
    actual = [
        (r.group, r.kind.value, r.variant, r.members, report.mitigation_names(r.kind))
        for r in report.summary_rows
    ]
    assert actual == REFERENCE_ROWS
    labels = [r.label for r in report.summary_rows]
    assert labels[5:7] == ["Unauthorized access to system data", "Unauthorized access to entity functionality"]


def test_case_study_summary_rows(deployment_model, knowledge):
    report = build_report(deployment_model, knowledge)
    actual = [(r.group, r.kind.value, r.variant, r.members) for r in report.summary_rows]
    assert actual == CASE_STUDY_ROWS
    assert len(CASE_STUDY_ROWS[3][3]) == 13
    assert ThreatKind.ELEVATION_OF_PRIVILEGE not in report.mitigations
