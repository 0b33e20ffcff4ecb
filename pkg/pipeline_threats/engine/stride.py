"""STRIDE-per-element applicability."""

from __future__ import annotations

from collections.abc import Iterable

from pipeline_threats.schema import FLOW, ElementKind, FlowMarker, ThreatClass

S = ThreatClass.SPOOFING
T = ThreatClass.TAMPERING
R = ThreatClass.REPUDIATION
I = ThreatClass.INFORMATION_DISCLOSURE  # noqa: E741
D = ThreatClass.DENIAL_OF_SERVICE
E = ThreatClass.ELEVATION_OF_PRIVILEGE

APPLICABILITY: dict[ElementKind | FlowMarker, frozenset[ThreatClass]] = {
    ElementKind.EXTERNAL_ENTITY: frozenset({S, R}),
    ElementKind.PROCESS: frozenset({S, T, R, I, D, E}),
    FLOW: frozenset({T, I, D}),
    ElementKind.DATA_STORE: frozenset({T, I, D}),
}

NON_INTEGRITY = frozenset({I, D})


def applicable_classes(kind: ElementKind | FlowMarker, is_log: bool = False) -> frozenset[ThreatClass]:
    classes = APPLICABILITY[kind]
    # repudiation applies to stores only when they are logs
    if kind == ElementKind.DATA_STORE and is_log:
        classes = classes | {R}
    return classes


def integrity_filter(
    classes: Iterable[ThreatClass], integrity_only: bool = True
) -> frozenset[ThreatClass]:
    classes = frozenset(classes)
    if not integrity_only:
        return classes
    return classes - NON_INTEGRITY
