"""Plain-dict forms of models, threats and reports for the json output."""

from __future__ import annotations

from typing import Any

from pipeline_threats.engine import Aggregation, Threat
from pipeline_threats.model import AnalysisOptions, DfdModel, Element, Flow, TrustBoundary
from pipeline_threats.report.deviations import Deviation
from pipeline_threats.schema import (
    CONSEQUENCE_ORDER,
    ConsequenceClass,
    ElementKind,
    PayloadKind,
    StageRole,
    ThreatKind,
)

JSON_SECTIONS = (
    "model",
    "options",
    "threats",
    "table3_rows",
    "table4_matrix",
    "deviations_applied",
    "summary",
)


def model_to_dict(model: DfdModel) -> dict[str, Any]:
    return {
        "name": model.name,
        "boundaries": [
            {"id": b.id, "name": b.name, "trusted": b.trusted} for b in model.boundaries
        ],
        "elements": [
            {
                "id": e.id,
                "name": e.name,
                "kind": e.kind.value,
                "role": e.role.value,
                "boundary": e.boundary,
                "is_log": e.is_log,
                "trusted": e.trusted,
            }
            for e in model.elements
        ],
        "flows": [
            {"id": f.id, "src": f.src, "dst": f.dst, "payload": f.payload.value}
            for f in model.flows
        ],
    }


def model_from_json(data: dict[str, Any]) -> DfdModel:
    """Rebuild the analysed model from a json report (options included)."""
    model = data["model"]
    return DfdModel(
        name=model["name"],
        boundaries=tuple(
            TrustBoundary(b["id"], b["name"], bool(b.get("trusted", False)))
            for b in model["boundaries"]
        ),
        elements=tuple(
            Element(
                id=e["id"],
                name=e["name"],
                kind=ElementKind(e["kind"]),
                role=StageRole(e["role"]),
                boundary=e["boundary"],
                is_log=bool(e.get("is_log", False)),
                trusted=bool(e.get("trusted", False)),
            )
            for e in model["elements"]
        ),
        flows=tuple(
            Flow(f["id"], f["src"], f["dst"], PayloadKind(f["payload"])) for f in model["flows"]
        ),
        options=AnalysisOptions(**data.get("options", {})),
    )


def threat_to_dict(threat: Threat) -> dict[str, Any]:
    return {
        "id": threat.id,
        "kind": threat.kind.value,
        "threat_class": threat.threat_class.value,
        "attributed_to": threat.attributed_to,
        "consequences": [c.value for c in threat.ordered_consequences],
        "evidence": threat.evidence,
        "spoofed": threat.spoofed,
        "victim": threat.victim,
        "via_flow": threat.via_flow,
        "variant": threat.variant,
        "mitigation_refs": list(threat.mitigation_refs),
        "incident_refs": list(threat.incident_refs),
    }


def threats_from_json(data: dict[str, Any]) -> list[Threat]:
    return [
        Threat(
            id=t["id"],
            kind=ThreatKind(t["kind"]),
            attributed_to=t["attributed_to"],
            consequences=frozenset(ConsequenceClass(c) for c in t["consequences"]),
            evidence=t["evidence"],
            spoofed=t.get("spoofed"),
            victim=t.get("victim"),
            via_flow=t.get("via_flow"),
            variant=t.get("variant"),
            mitigation_refs=tuple(t.get("mitigation_refs", ())),
            incident_refs=tuple(t.get("incident_refs", ())),
        )
        for t in data["threats"]
    ]


def matrix_to_dict(aggregation: Aggregation) -> dict[str, Any]:
    return {
        "columns": [c.value for c in CONSEQUENCE_ORDER],
        "rows": [
            {
                "section": row.section,
                "label": row.label,
                "cells": {c.value: row.cell(c) for c in CONSEQUENCE_ORDER},
            }
            for row in aggregation.matrix
        ],
    }


def deviation_to_dict(deviation: Deviation) -> dict[str, Any]:
    return {
        "id": deviation.id,
        "model": deviation.model,
        "table": deviation.table,
        "cells": [
            {
                "cell": cell.cell,
                "paper_value": cell.paper_value,
                "engine_value": cell.engine_value,
            }
            for cell in deviation.cells
        ],
        "justification": deviation.justification,
        "quotes": list(deviation.quotes),
    }
