"""Roll threats up into summary rows and the element × consequence matrix."""

from __future__ import annotations

from collections import defaultdict
from collections.abc import Iterable
from dataclasses import dataclass

from pipeline_threats.engine.threat import Threat
from pipeline_threats.model import DfdModel
from pipeline_threats.schema import (
    CONSEQUENCE_ORDER,
    EOP_VARIANT_LABELS,
    EOP_VARIANTS,
    FLOW_ATTRIBUTED_KINDS,
    STRIDE_ORDER,
    THREAT_GROUP_OF,
    THREAT_GROUPS,
    ConsequenceClass,
    ElementKind,
    ThreatClass,
    ThreatKind,
    letters,
)

KIND_ORDER = {kind: i for i, kind in enumerate(ThreatKind)}
CLASS_ORDER = {cls: i for i, cls in enumerate(STRIDE_ORDER)}
GROUP_ORDER = {group: i for i, group in enumerate(THREAT_GROUPS)}
VARIANT_ORDER = {variant: i for i, variant in enumerate(EOP_VARIANTS)}

FLOW_SECTION = "Data flow"


@dataclass(frozen=True)
class SummaryRow:
    """One distinct (group, threat kind, variant) row with its members."""

    group: str
    kind: ThreatKind
    variant: str | None
    members: tuple[str, ...]

    @property
    def threat_class(self) -> ThreatClass:
        return self.kind.threat_class

    @property
    def label(self) -> str:
        if self.variant is not None:
            return EOP_VARIANT_LABELS[self.variant]
        return self.kind.label

    def sort_key(self) -> tuple[int, int, int, int]:
        return (
            GROUP_ORDER[self.group],
            CLASS_ORDER[self.threat_class],
            KIND_ORDER[self.kind],
            VARIANT_ORDER.get(self.variant or "", -1),
        )


@dataclass(frozen=True)
class MatrixRow:
    section: str
    label: str
    cells: tuple[frozenset[ThreatClass], ...]

    def cell(self, consequence: ConsequenceClass) -> str:
        return letters(self.cells[CONSEQUENCE_ORDER.index(consequence)])

    def as_dict(self) -> dict[ConsequenceClass, str]:
        return {c: self.cell(c) for c in CONSEQUENCE_ORDER}


@dataclass(frozen=True)
class Aggregation:
    summary_rows: tuple[SummaryRow, ...]
    matrix: tuple[MatrixRow, ...]

    def matrix_by_label(self) -> dict[str, dict[ConsequenceClass, str]]:
        return {row.label: row.as_dict() for row in self.matrix}


def _row_key(model: DfdModel, threat: Threat) -> tuple[str, str]:
    if threat.kind in FLOW_ATTRIBUTED_KINDS:
        return FLOW_SECTION, model.flow_label(model.flow(threat.attributed_to))
    return model.element(threat.attributed_to).kind.label, threat.attributed_to


def _matrix(model: DfdModel, threats: list[Threat]) -> tuple[MatrixRow, ...]:
    marks: dict[tuple[str, str], dict[ConsequenceClass, set[ThreatClass]]] = defaultdict(
        lambda: defaultdict(set)
    )
    for threat in threats:
        cells = marks[_row_key(model, threat)]
        for consequence in threat.consequences:
            cells[consequence].add(threat.threat_class)

    def row(section: str, key: str, label: str) -> MatrixRow:
        cells = marks.get((section, key), {})
        return MatrixRow(
            section,
            label,
            tuple(frozenset(cells.get(c, ())) for c in CONSEQUENCE_ORDER),
        )

    rows: list[MatrixRow] = []
    for kind in (ElementKind.EXTERNAL_ENTITY, ElementKind.PROCESS):
        rows.extend(row(kind.label, e.id, e.name) for e in model.elements_of(kind))
    seen: set[str] = set()
    for flow in model.flows:
        label = model.flow_label(flow)
        if label not in seen:
            seen.add(label)
            rows.append(row(FLOW_SECTION, label, label))
    store = ElementKind.DATA_STORE
    rows.extend(row(store.label, e.id, e.name) for e in model.elements_of(store))
    return tuple(rows)


def _summary(model: DfdModel, threats: list[Threat]) -> tuple[SummaryRow, ...]:
    position = {e.id: i for i, e in enumerate(model.elements)}
    position.update({f.id: i for i, f in enumerate(model.flows)})
    grouped: dict[tuple[str, ThreatKind, str | None], list[Threat]] = defaultdict(list)
    for threat in threats:
        grouped[(THREAT_GROUP_OF[threat.kind], threat.kind, threat.variant)].append(threat)

    rows: list[SummaryRow] = []
    for (group, kind, variant), members in grouped.items():
        labels: list[str] = []
        for threat in sorted(members, key=lambda t: position[t.attributed_to]):
            if kind in FLOW_ATTRIBUTED_KINDS:
                label = model.flow_label(model.flow(threat.attributed_to))
            else:
                label = model.element(threat.attributed_to).name
            if label not in labels:
                labels.append(label)
        rows.append(SummaryRow(group, kind, variant, tuple(labels)))
    return tuple(sorted(rows, key=SummaryRow.sort_key))


def aggregate_rows(threats: Iterable[Threat], model: DfdModel) -> Aggregation:
    threats = list(threats)
    return Aggregation(_summary(model, threats), _matrix(model, threats))
