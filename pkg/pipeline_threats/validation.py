"""Semantic checks for pipeline models. Problems come back as data, never raised."""

from __future__ import annotations

from collections import Counter

from pipeline_threats.model import DfdModel, Diagnostic
from pipeline_threats.schema import ElementKind


def _error(code: str, message: str, subject: str | None, attribute: str | None = None) -> Diagnostic:
    return Diagnostic("error", code, message, subject=subject, attribute=attribute)


def _warning(code: str, message: str, subject: str | None) -> Diagnostic:
    return Diagnostic("warning", code, message, subject=subject)


def _duplicates(ids: list[str]) -> list[str]:
    counts = Counter(ids)
    seen: set[str] = set()
    out: list[str] = []
    for item in ids:
        if counts[item] > 1 and item not in seen:
            seen.add(item)
            out.append(item)
    return out


# An actor committing straight into a repository (DevOps pushing IaC) is the one
# direct flow allowed without a process in between.
DIRECT_WRITES = frozenset({(ElementKind.EXTERNAL_ENTITY, ElementKind.DATA_STORE)})


def well_formed_flow(src: ElementKind, dst: ElementKind) -> bool:
    return ElementKind.PROCESS in (src, dst) or (src, dst) in DIRECT_WRITES


def validate(model: DfdModel) -> list[Diagnostic]:
    """Every invariant violation of ``model``, errors first in model order, then warnings."""
    errors: list[Diagnostic] = []
    warnings: list[Diagnostic] = []

    for dup in _duplicates([b.id for b in model.boundaries]):
        errors.append(_error("duplicate-id", f"boundary id {dup!r} is defined more than once", dup))
    # elements and flows share one namespace
    for dup in _duplicates([e.id for e in model.elements] + [f.id for f in model.flows]):
        errors.append(_error("duplicate-id", f"id {dup!r} is defined more than once", dup))

    for element in model.elements:
        if not model.has_boundary(element.boundary):
            errors.append(
                _error(
                    "unknown-boundary",
                    f"element {element.id!r} references unknown boundary {element.boundary!r}",
                    element.id,
                    "boundary",
                )
            )
        expected = element.role.spec.expected_kind
        if expected is not None and expected != element.kind:
            errors.append(
                _error(
                    "role-kind",
                    f"role {element.role.value} expects a {expected.value}, "
                    f"but {element.id!r} is a {element.kind.value}",
                    element.id,
                    "role",
                )
            )
        if element.is_log and element.kind != ElementKind.DATA_STORE:
            errors.append(
                _error(
                    "log-not-store",
                    f"only data stores can be logs; {element.id!r} is a {element.kind.value}",
                    element.id,
                    "log",
                )
            )

    for flow in model.flows:
        missing = False
        for attribute in ("src", "dst"):
            ref = getattr(flow, attribute)
            if not model.has_element(ref):
                missing = True
                errors.append(
                    _error(
                        "unknown-element",
                        f"flow {flow.id!r} references unknown element {ref!r}",
                        flow.id,
                        attribute,
                    )
                )
        if flow.src == flow.dst:
            errors.append(
                _error("self-flow", f"flow {flow.id!r} starts and ends at {flow.src!r}", flow.id, "dst")
            )
            continue
        if missing:
            continue
        if not well_formed_flow(model.element(flow.src).kind, model.element(flow.dst).kind):
            errors.append(
                _error(
                    "flow-endpoints",
                    f"flow {flow.id!r} connects {flow.src!r} and {flow.dst!r} "
                    "without passing through a process",
                    flow.id,
                )
            )

    touched = {f.src for f in model.flows} | {f.dst for f in model.flows}
    for element in model.elements:
        if element.id not in touched:
            warnings.append(
                _warning("isolated-element", f"element {element.id!r} has no flows", element.id)
            )
    for store in model.elements_of(ElementKind.DATA_STORE):
        consumed = {f.payload for f in model.outbound(store.id)}
        for flow in model.inbound(store.id):
            if flow.payload not in consumed:
                warnings.append(
                    _warning(
                        "unconsumed-payload",
                        f"{flow.payload.value} written to {store.id!r} by flow {flow.id!r} "
                        "is never read back",
                        flow.id,
                    )
                )

    return errors + warnings


def errors_only(diagnostics: list[Diagnostic]) -> list[Diagnostic]:
    return [d for d in diagnostics if d.is_error]
