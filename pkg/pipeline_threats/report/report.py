"""Analysis report: threats, aggregated tables and catalog attachments."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, replace

from pipeline_threats.engine import Aggregation, SummaryRow, Threat, aggregate_rows, enumerate_threats
from pipeline_threats.kb import IncidentEntry, KnowledgeBase, MitigationEntry
from pipeline_threats.model import AnalysisOptions, DfdModel
from pipeline_threats.report.deviations import Deviation, applied_deviations
from pipeline_threats.schema import ThreatKind


@dataclass(frozen=True)
class Report:
    model: DfdModel
    threats: tuple[Threat, ...]
    aggregation: Aggregation
    mitigations: dict[ThreatKind, tuple[MitigationEntry, ...]]
    incidents: dict[ThreatKind, tuple[IncidentEntry, ...]]
    deviations_applied: tuple[Deviation, ...] = ()

    @property
    def options(self) -> AnalysisOptions:
        return self.model.options

    @property
    def summary_rows(self) -> tuple[SummaryRow, ...]:
        return self.aggregation.summary_rows

    def mitigation_names(self, kind: ThreatKind) -> list[str]:
        return [m.name for m in self.mitigations.get(kind, ())]


def _attach(threat: Threat, knowledge: KnowledgeBase) -> Threat:
    return replace(
        threat,
        mitigation_refs=tuple(m.id for m in knowledge.mitigations_for(threat.kind)),
        incident_refs=tuple(i.id for i in knowledge.incidents_for(threat.kind)),
    )


def build_report(
    model: DfdModel,
    knowledge: KnowledgeBase,
    deviations: Sequence[Deviation] = (),
) -> Report:
    """Run the engine on ``model`` (with its own options) and assemble the report."""
    threats = tuple(_attach(t, knowledge) for t in enumerate_threats(model))
    aggregation = aggregate_rows(threats, model)
    kinds = sorted({t.kind for t in threats}, key=list(ThreatKind).index)
    return Report(
        model=model,
        threats=threats,
        aggregation=aggregation,
        mitigations={k: tuple(knowledge.mitigations_for(k)) for k in kinds},
        incidents={k: tuple(knowledge.incidents_for(k)) for k in kinds},
        deviations_applied=applied_deviations(
            deviations, model.name, aggregation.matrix_by_label()
        ),
    )
