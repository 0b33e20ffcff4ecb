"""Integrity threat rules for pipeline DFDs.

Each rule family walks one element kind, derives consequence sets from the
flows around the element and yields candidate threats. Candidates are then
filtered: empty consequence sets are dropped, and so is any class the
attributed element cannot carry.
"""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass

from pipeline_threats.engine.consequences import (
    BUILD,
    flow_consequences,
    inbound_consequences,
    outbound_consequences,
    stored_consequences,
)
from pipeline_threats.engine.stride import applicable_classes, integrity_filter
from pipeline_threats.engine.threat import Threat
from pipeline_threats.model import AnalysisOptions, DfdModel, Element, Flow, ModelError
from pipeline_threats.schema import (
    FLOW_ATTRIBUTED_KINDS,
    FLOW,
    ConsequenceClass,
    ElementKind,
    StageRole,
    ThreatKind,
)
from pipeline_threats.validation import errors_only, validate

K = ThreatKind


@dataclass(frozen=True)
class _Context:
    model: DfdModel
    options: AnalysisOptions

    def crosses(self, flow: Flow) -> bool:
        if not self.options.boundary_suppression:
            return True
        return self.model.crosses_boundary(flow)

    def extras(self, element: Element) -> frozenset[ConsequenceClass]:
        extras = element.role.spec.extra_outbound
        if not self.options.include_build_tool_threats:
            extras = extras - {BUILD}
        return extras

    def name(self, element_id: str) -> str:
        return self.model.element(element_id).name


def _targets(ctx: _Context, flows: list[Flow]) -> str:
    return ", ".join(f"{ctx.name(f.dst)} ({f.payload.value}, {f.id})" for f in flows)


def _sources(ctx: _Context, flows: list[Flow]) -> str:
    return ", ".join(f"{ctx.name(f.src)} ({f.payload.value}, {f.id})" for f in flows)


def _is_spoofable_source(element: Element) -> bool:
    if element.kind == ElementKind.DATA_STORE:
        return True
    return element.kind == ElementKind.EXTERNAL_ENTITY and element.role.spec.entity_exempt


def _faces_entity(ctx: _Context, process: Element) -> bool:
    for flow in ctx.model.flows:
        if process.id not in (flow.src, flow.dst):
            continue
        other = ctx.model.element(flow.dst if flow.src == process.id else flow.src)
        if other.kind == ElementKind.EXTERNAL_ENTITY and not other.role.spec.entity_exempt:
            return True
    return False


def entity_threats(ctx: _Context) -> Iterator[Threat]:
    if not ctx.options.include_entity_threats:
        return
    for entity in ctx.model.elements_of(ElementKind.EXTERNAL_ENTITY):
        if entity.role.spec.entity_exempt:
            continue
        outbound = list(ctx.model.outbound(entity.id))
        crossing = [f for f in outbound if ctx.crosses(f)]
        extras = ctx.extras(entity)
        yield Threat.make(
            K.USER_SPOOFING,
            entity.id,
            outbound_consequences(ctx.model, crossing, extras if crossing else frozenset()),
            f"an impostor of {entity.name} can send {_targets(ctx, crossing)}",
            spoofed=entity.id,
        )
        yield Threat.make(
            K.ENTITY_REPUDIATION,
            entity.id,
            outbound_consequences(ctx.model, outbound, extras),
            f"{entity.name} can deny having sent {_targets(ctx, outbound)}",
        )


def process_threats(ctx: _Context) -> Iterator[Threat]:
    for process in ctx.model.elements_of(ElementKind.PROCESS):
        inbound = list(ctx.model.inbound(process.id))
        outbound = list(ctx.model.outbound(process.id))
        crossing_in = [f for f in inbound if ctx.crosses(f)]
        crossing_out = [f for f in outbound if ctx.crosses(f)]
        extras = ctx.extras(process)
        writes = outbound_consequences(ctx.model, outbound, extras)

        if not ctx.model.is_trusted(process):
            yield Threat.make(
                K.SERVER_SPOOFING,
                process.id,
                outbound_consequences(ctx.model, crossing_out, extras if crossing_out else frozenset()),
                f"a fake {process.name} can serve {_targets(ctx, crossing_out)}",
                spoofed=process.id,
            )

        spoofable = sorted(
            {ctx.name(f.src) for f in crossing_in if _is_spoofable_source(ctx.model.element(f.src))}
        )
        evidence = f"{process.name} accepts {_sources(ctx, crossing_in)}"
        if spoofable:
            evidence += f"; spoofable sources: {', '.join(spoofable)}"
        yield Threat.make(
            K.UNRELIABLE_INPUT,
            process.id,
            inbound_consequences(process, crossing_in),
            evidence,
            victim=process.id,
        )

        yield Threat.make(
            K.LOCAL_FALSIFICATION,
            process.id,
            writes,
            f"a compromised {process.name} receives genuine data but writes falsified "
            f"{_targets(ctx, outbound)}",
        )

        if ctx.options.include_eop:
            variant = "entity_functionality" if _faces_entity(ctx, process) else "system_data"
            reach = "entity functionality" if variant == "entity_functionality" else "system data"
            yield Threat.make(
                K.ELEVATION_OF_PRIVILEGE,
                process.id,
                writes,
                f"an intruder in {process.name} gains {reach} and controls {_targets(ctx, outbound)}",
                variant=variant,
            )

        if ctx.options.include_process_repudiation:
            yield Threat.make(
                K.PROCESS_REPUDIATION,
                process.id,
                writes,
                f"{process.name} can deny having written {_targets(ctx, outbound)}",
            )

        if process.role == StageRole.CONTINUOUS_INTEGRATION:
            yield from _build_threats(ctx, process, inbound)


def _build_threats(ctx: _Context, process: Element, inbound: list[Flow]) -> Iterator[Threat]:
    if ctx.options.include_build_tool_threats:
        yield Threat.make(
            K.SUBVERTED_BUILD_TOOL,
            process.id,
            frozenset({BUILD}),
            f"a backdoored compiler or build tool in {process.name} turns correct sources "
            "into malicious binaries",
        )
    if not ctx.options.include_dependency_threats:
        return
    dependencies = [
        f for f in inbound if ctx.model.element(f.src).role == StageRole.DEPENDENCY_SOURCE
    ]
    if not dependencies:
        return
    pulled = inbound_consequences(process, dependencies)
    yield Threat.make(
        K.UNTRUSTED_DEPENDENCY,
        process.id,
        pulled,
        f"{process.name} pulls {_sources(ctx, dependencies)}",
    )
    yield Threat.make(
        K.DEPENDENCY_CONFUSION,
        process.id,
        pulled | {BUILD},
        f"a public package reusing a private name can replace {_sources(ctx, dependencies)}",
    )


def flow_threats(ctx: _Context) -> Iterator[Threat]:
    for flow in ctx.model.flows:
        if not ctx.crosses(flow):
            continue
        consequences = flow_consequences(ctx.model, flow)
        label = ctx.model.flow_label(flow)
        yield Threat.make(
            K.FLOW_TAMPERING,
            flow.id,
            consequences,
            f"{flow.payload.value} can be altered in transit on {label} ({flow.id})",
            victim=flow.dst,
            via_flow=flow.id,
        )
        src = ctx.model.element(flow.src)
        if src.kind == ElementKind.EXTERNAL_ENTITY and not src.role.spec.entity_exempt:
            yield Threat.make(
                K.MALICIOUS_CLIENT_TOOL,
                flow.id,
                consequences,
                f"a malicious tool used by {src.name} can alter {flow.payload.value} "
                f"before it leaves on {label} ({flow.id})",
                victim=flow.dst,
                via_flow=flow.id,
            )


def store_threats(ctx: _Context) -> Iterator[Threat]:
    for store in ctx.model.elements_of(ElementKind.DATA_STORE):
        consequences = stored_consequences(ctx.model, store)
        payloads = sorted(
            {f.payload.value for f in ctx.model.flows if store.id in (f.src, f.dst)}
        )
        if not ctx.model.is_trusted(store):
            yield Threat.make(
                K.STORE_TAMPERING,
                store.id,
                consequences,
                f"{store.name} holds {', '.join(payloads)}",
            )
        if store.is_log:
            yield Threat.make(
                K.LOG_REPUDIATION,
                store.id,
                consequences,
                f"records in the {store.name} log can be altered to hide {', '.join(payloads)}",
            )


RULE_FAMILIES = (entity_threats, process_threats, flow_threats, store_threats)


def _conforms(ctx: _Context, threat: Threat) -> bool:
    if threat.kind in FLOW_ATTRIBUTED_KINDS:
        allowed = applicable_classes(FLOW)
    else:
        element = ctx.model.element(threat.attributed_to)
        allowed = applicable_classes(element.kind, element.is_log)
    return threat.threat_class in integrity_filter(allowed, ctx.options.integrity_only)


def enumerate_threats(model: DfdModel) -> list[Threat]:
    errors = errors_only(validate(model))
    if errors:
        raise ModelError(f"cannot analyze an invalid model: {errors[0].message}")
    ctx = _Context(model, model.options)
    threats = [
        threat
        for family in RULE_FAMILIES
        for threat in family(ctx)
        if threat.consequences and _conforms(ctx, threat)
    ]
    return sorted(threats, key=Threat.sort_key)
