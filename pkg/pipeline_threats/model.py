"""Pipeline data-flow-diagram types and the graph queries the rule engine relies on."""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from functools import cached_property
from typing import Iterator

from pipeline_threats.schema import ElementKind, PayloadKind, Severity, StageRole


class ModelError(ValueError):
    """Raised when a model query or transformation gets an impossible request."""


@dataclass(frozen=True)
class TrustBoundary:
    id: str
    name: str
    trusted: bool = False


@dataclass(frozen=True)
class Element:
    id: str
    name: str
    kind: ElementKind
    role: StageRole
    boundary: str
    is_log: bool = False
    trusted: bool = False


@dataclass(frozen=True)
class Flow:
    id: str
    src: str
    dst: str
    payload: PayloadKind


@dataclass(frozen=True)
class AnalysisOptions:
    integrity_only: bool = True
    include_eop: bool = True
    include_dependency_threats: bool = True
    include_build_tool_threats: bool = True
    include_entity_threats: bool = True
    boundary_suppression: bool = True
    include_process_repudiation: bool = False

    @classmethod
    def names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))

    def as_dict(self) -> dict[str, bool]:
        return {name: getattr(self, name) for name in self.names()}

    def non_defaults(self) -> dict[str, bool]:
        default = AnalysisOptions()
        return {
            name: value
            for name, value in self.as_dict().items()
            if getattr(default, name) != value
        }

    def with_overrides(self, **overrides: bool) -> AnalysisOptions:
        unknown = set(overrides) - set(self.names())
        if unknown:
            raise ModelError(f"unknown analysis options: {', '.join(sorted(unknown))}")
        return replace(self, **overrides)


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int = 1


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    code: str
    message: str
    location: SourceSpan | None = None
    subject: str | None = None
    attribute: str | None = None

    @property
    def is_error(self) -> bool:
        return self.severity == "error"

    def format(self, path: str = "<model>") -> str:
        if self.location is None:
            return f"{path}: {self.severity}[{self.code}]: {self.message}"
        line, col = self.location.line, self.location.column
        return f"{path}:{line}:{col}: {self.severity}[{self.code}]: {self.message}"


@dataclass(frozen=True)
class DfdModel:
    name: str = "untitled"
    boundaries: tuple[TrustBoundary, ...] = ()
    elements: tuple[Element, ...] = ()
    flows: tuple[Flow, ...] = ()
    options: AnalysisOptions = field(default_factory=AnalysisOptions)

    @cached_property
    def _elements_by_id(self) -> dict[str, Element]:
        return {e.id: e for e in self.elements}

    @cached_property
    def _boundaries_by_id(self) -> dict[str, TrustBoundary]:
        return {b.id: b for b in self.boundaries}

    @cached_property
    def _flows_by_id(self) -> dict[str, Flow]:
        return {f.id: f for f in self.flows}

    def element(self, element_id: str) -> Element:
        try:
            return self._elements_by_id[element_id]
        except KeyError:
            raise ModelError(f"unknown element: {element_id}") from None

    def boundary(self, boundary_id: str) -> TrustBoundary:
        try:
            return self._boundaries_by_id[boundary_id]
        except KeyError:
            raise ModelError(f"unknown boundary: {boundary_id}") from None

    def flow(self, flow_id: str) -> Flow:
        try:
            return self._flows_by_id[flow_id]
        except KeyError:
            raise ModelError(f"unknown flow: {flow_id}") from None

    def has_element(self, element_id: str) -> bool:
        return element_id in self._elements_by_id

    def has_boundary(self, boundary_id: str) -> bool:
        return boundary_id in self._boundaries_by_id

    def inbound(self, element_id: str) -> Iterator[Flow]:
        return (f for f in self.flows if f.dst == element_id)

    def outbound(self, element_id: str) -> Iterator[Flow]:
        return (f for f in self.flows if f.src == element_id)

    def elements_of(self, kind: ElementKind) -> Iterator[Element]:
        return (e for e in self.elements if e.kind == kind)

    def is_trusted(self, element: Element) -> bool:
        """Own flag or the flag of the enclosing boundary."""
        if element.trusted:
            return True
        boundary = self._boundaries_by_id.get(element.boundary)
        return boundary is not None and boundary.trusted

    def crosses_boundary(self, flow: Flow) -> bool:
        return self.element(flow.src).boundary != self.element(flow.dst).boundary

    def flow_label(self, flow: Flow) -> str:
        return f"{self.element(flow.src).name} → {self.element(flow.dst).name}"

    def canonical(self) -> DfdModel:
        """Same model with boundaries, elements and flows sorted by id."""
        return replace(
            self,
            boundaries=tuple(sorted(self.boundaries, key=lambda b: b.id)),
            elements=tuple(sorted(self.elements, key=lambda e: e.id)),
            flows=tuple(sorted(self.flows, key=lambda f: f.id)),
        )


def structurally_equal(a: DfdModel, b: DfdModel) -> bool:
    return a.canonical() == b.canonical()


def merge_boundaries(model: DfdModel, a: str, b: str) -> DfdModel:
    """Move every element of boundary ``b`` into ``a`` and drop ``b``."""
    if a == b:
        raise ModelError(f"cannot merge boundary {a} with itself")
    first = model.boundary(a)
    second = model.boundary(b)
    merged = replace(first, trusted=first.trusted or second.trusted)
    boundaries = tuple(merged if x.id == a else x for x in model.boundaries if x.id != b)
    elements = tuple(replace(e, boundary=a) if e.boundary == b else e for e in model.elements)
    return replace(model, boundaries=boundaries, elements=elements)


def store_consumers(
    model: DfdModel, store: str, payload: PayloadKind
) -> frozenset[tuple[str, StageRole]]:
    element = model.element(store)
    if element.kind != ElementKind.DATA_STORE:
        raise ModelError(f"{store} is a {element.kind.value}, not a data store")
    return frozenset(
        (flow.dst, model.element(flow.dst).role)
        for flow in model.outbound(store)
        if flow.payload == payload
    )
