"""Canonical ``.dfd`` text for a model."""

from __future__ import annotations

from pipeline_threats.model import DfdModel, ModelError
from pipeline_threats.validation import errors_only, validate

HEADER = "# pipeline data flow diagram"


ESCAPES = str.maketrans({"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"})


def quote(text: str) -> str:
    return f'"{text.translate(ESCAPES)}"'


def render(model: DfdModel) -> str:
    errors = errors_only(validate(model))
    if errors:
        raise ModelError(f"cannot render an invalid model: {errors[0].message}")
    canonical = model.canonical()
    lines = [HEADER, f"model {quote(canonical.name)}"]

    non_defaults = canonical.options.non_defaults()
    if non_defaults:
        lines.append("")
        for name in sorted(non_defaults):
            lines.append(f"option {name}={'true' if non_defaults[name] else 'false'}")

    if canonical.boundaries:
        lines.append("")
        for boundary in canonical.boundaries:
            flag = " trusted" if boundary.trusted else ""
            lines.append(f"boundary {boundary.id} {quote(boundary.name)}{flag}")

    if canonical.elements:
        lines.append("")
        for element in canonical.elements:
            parts = [
                element.kind.value,
                element.id,
                quote(element.name),
                f"role={element.role.value}",
                f"boundary={element.boundary}",
            ]
            if element.is_log:
                parts.append("log")
            if element.trusted:
                parts.append("trusted")
            lines.append(" ".join(parts))

    if canonical.flows:
        lines.append("")
        for flow in canonical.flows:
            lines.append(f"flow {flow.id} {flow.src} -> {flow.dst} payload={flow.payload.value}")

    return "\n".join(lines) + "\n"
