"""Which integrity consequences tampered data can have downstream."""

from __future__ import annotations

from collections.abc import Iterable

from pipeline_threats.model import DfdModel, Element, Flow, store_consumers
from pipeline_threats.schema import ConsequenceClass, ElementKind, PayloadKind, StageRole

SOURCE = ConsequenceClass.SOURCE_TAMPERING
BINARY = ConsequenceClass.BINARY_TAMPERING
BUILD = ConsequenceClass.IMPROPER_BUILD
CONTROL = ConsequenceClass.CONTROL_INFO_TAMPERING
INFRA = ConsequenceClass.INFRASTRUCTURE_TAMPERING

# Context for data at rest, as opposed to a consuming role.
STORE_CONTEXT = None

PAYLOAD_CONSEQUENCES: dict[PayloadKind, frozenset[ConsequenceClass]] = {
    PayloadKind.SOURCE_CODE: frozenset({SOURCE}),
    PayloadKind.BUILD_CONFIG: frozenset({SOURCE}),
    PayloadKind.REVIEW_DECISION: frozenset({SOURCE}),
    PayloadKind.BINARY_ARTIFACT: frozenset({BINARY}),
    PayloadKind.RELEASED_ARTIFACT: frozenset({BINARY}),
    PayloadKind.BINARY_UNDER_EVALUATION: frozenset({CONTROL}),
    PayloadKind.PACKAGE_SOURCE_FORM: frozenset({SOURCE}),
    PayloadKind.PACKAGE_BINARY_FORM: frozenset({BUILD}),
    PayloadKind.TEST_REPORT: frozenset({CONTROL}),
    PayloadKind.DEPLOY_REPORT: frozenset({CONTROL}),
    PayloadKind.TEST_FEEDBACK: frozenset({CONTROL}),
}

# Infrastructure code steers the test environment or production, depending on who runs it.
IAC_BY_ROLE: dict[StageRole, frozenset[ConsequenceClass]] = {
    StageRole.TEST_STAGE: frozenset({CONTROL}),
    StageRole.DEPLOYMENT: frozenset({INFRA}),
}
IAC_DEFAULT = frozenset({CONTROL, INFRA})


def consequence_of(payload: PayloadKind, context: StageRole | None) -> frozenset[ConsequenceClass]:
    if payload == PayloadKind.IAC_CONFIG:
        if context is None:
            return IAC_DEFAULT
        return IAC_BY_ROLE.get(context, IAC_DEFAULT)
    return PAYLOAD_CONSEQUENCES[payload]


def union(sets: Iterable[frozenset[ConsequenceClass]]) -> frozenset[ConsequenceClass]:
    out: frozenset[ConsequenceClass] = frozenset()
    for item in sets:
        out |= item
    return out


def flow_consequences(model: DfdModel, flow: Flow) -> frozenset[ConsequenceClass]:
    """Consequences of tampering ``flow``, looking one step through a destination store."""
    dst = model.element(flow.dst)
    if dst.kind != ElementKind.DATA_STORE:
        return consequence_of(flow.payload, dst.role)
    consumers = store_consumers(model, dst.id, flow.payload)
    if not consumers:
        return consequence_of(flow.payload, STORE_CONTEXT)
    return union(consequence_of(flow.payload, role) for _, role in consumers)


def inbound_consequences(element: Element, flows: Iterable[Flow]) -> frozenset[ConsequenceClass]:
    return union(consequence_of(f.payload, element.role) for f in flows)


def outbound_consequences(
    model: DfdModel, flows: Iterable[Flow], extras: frozenset[ConsequenceClass] = frozenset()
) -> frozenset[ConsequenceClass]:
    return union(flow_consequences(model, f) for f in flows) | extras


def stored_consequences(model: DfdModel, store: Element) -> frozenset[ConsequenceClass]:
    payloads = {f.payload for f in model.flows if store.id in (f.src, f.dst)}
    return union(consequence_of(p, STORE_CONTEXT) for p in payloads)
