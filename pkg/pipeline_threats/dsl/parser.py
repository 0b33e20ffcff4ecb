"""Parse ``.dfd`` text into a validated DfdModel with located diagnostics."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from pipeline_threats.dsl.lexer import LexError, Token, iter_token_lines
from pipeline_threats.model import (
    AnalysisOptions,
    DfdModel,
    Diagnostic,
    Element,
    Flow,
    SourceSpan,
    TrustBoundary,
)
from pipeline_threats.schema import ElementKind, PayloadKind, StageRole, parse_bool
from pipeline_threats.validation import validate

ELEMENT_KEYWORDS: dict[str, ElementKind] = {
    "entity": ElementKind.EXTERNAL_ENTITY,
    "process": ElementKind.PROCESS,
    "store": ElementKind.DATA_STORE,
}
KEYWORDS = ("model", "boundary", *ELEMENT_KEYWORDS, "flow", "option")
ELEMENT_FLAGS = frozenset({"log", "trusted"})
ELEMENT_ATTRIBUTES = frozenset({"role", "boundary"})

ROLES = {r.value: r for r in StageRole}
PAYLOADS = {p.value: p for p in PayloadKind}


class StatementError(ValueError):
    def __init__(self, code: str, message: str, span: SourceSpan) -> None:
        super().__init__(message)
        self.code = code
        self.message = message
        self.span = span


@dataclass(frozen=True)
class ParseResult:
    model: DfdModel | None
    diagnostics: tuple[Diagnostic, ...] = ()

    @property
    def errors(self) -> tuple[Diagnostic, ...]:
        return tuple(d for d in self.diagnostics if d.is_error)

    @property
    def warnings(self) -> tuple[Diagnostic, ...]:
        return tuple(d for d in self.diagnostics if not d.is_error)

    @property
    def ok(self) -> bool:
        return self.model is not None


@dataclass
class _Draft:
    """Mutable accumulator for one document."""

    name: str
    name_span: SourceSpan | None = None
    options: dict[str, bool] = field(default_factory=dict)
    boundaries: list[TrustBoundary] = field(default_factory=list)
    elements: list[Element] = field(default_factory=list)
    flows: list[Flow] = field(default_factory=list)
    spans: dict[tuple[str, str | None], SourceSpan] = field(default_factory=dict)
    boundary_ids: set[str] = field(default_factory=set)
    node_ids: set[str] = field(default_factory=set)

    def build(self) -> DfdModel:
        return DfdModel(
            name=self.name,
            boundaries=tuple(self.boundaries),
            elements=tuple(self.elements),
            flows=tuple(self.flows),
            options=AnalysisOptions().with_overrides(**self.options),
        )

    def locate(self, diagnostic: Diagnostic) -> SourceSpan:
        subject = diagnostic.subject
        if subject is not None:
            for key in ((subject, diagnostic.attribute), (subject, None)):
                if key in self.spans:
                    return self.spans[key]
        return SourceSpan(1, 1)


def _expect(tokens: list[Token], index: int, type_: str, what: str) -> Token:
    if index >= len(tokens):
        last = tokens[-1].span
        raise StatementError(
            "syntax", f"expected {what}", SourceSpan(last.line, last.column + last.length)
        )
    token = tokens[index]
    if token.type != type_:
        raise StatementError("syntax", f"expected {what}, found {token.value!r}", token.span)
    return token


def _attributes(
    tokens: list[Token], start: int
) -> tuple[dict[str, tuple[Token, Token]], dict[str, Token]]:
    """Trailing ``key=value`` pairs and bare flags from ``tokens[start:]``."""
    pairs: dict[str, tuple[Token, Token]] = {}
    flags: dict[str, Token] = {}
    i = start
    while i < len(tokens):
        key = tokens[i]
        if key.type != "ident":
            raise StatementError("syntax", f"unexpected {key.value!r}", key.span)
        if i + 1 < len(tokens) and tokens[i + 1].type == "equals":
            value = _expect(tokens, i + 2, "ident", f"a value for {key.value}")
            if key.value in pairs:
                raise StatementError(
                    "duplicate-attribute", f"attribute {key.value} given twice", key.span
                )
            pairs[key.value] = (key, value)
            i += 3
            continue
        if key.value in flags:
            raise StatementError("duplicate-attribute", f"flag {key.value} given twice", key.span)
        flags[key.value] = key
        i += 1
    return pairs, flags


def _claim_node_id(draft: _Draft, token: Token) -> None:
    if token.value in draft.node_ids:
        raise StatementError("duplicate-id", f"id {token.value!r} is already defined", token.span)
    draft.node_ids.add(token.value)


def _model_statement(draft: _Draft, tokens: list[Token]) -> None:
    name = _expect(tokens, 1, "string", "a quoted model name")
    if draft.name_span is not None:
        raise StatementError("duplicate-model", "model name is already set", tokens[0].span)
    if len(tokens) > 2:
        raise StatementError("syntax", f"unexpected {tokens[2].value!r}", tokens[2].span)
    draft.name = name.value
    draft.name_span = name.span


def _boundary_statement(draft: _Draft, tokens: list[Token]) -> None:
    ident = _expect(tokens, 1, "ident", "a boundary id")
    name = _expect(tokens, 2, "string", "a quoted boundary name")
    pairs, flags = _attributes(tokens, 3)
    if pairs:
        key, _ = next(iter(pairs.values()))
        raise StatementError("unknown-attribute", f"boundary has no attribute {key.value}", key.span)
    for flag, token in flags.items():
        if flag != "trusted":
            raise StatementError("unknown-attribute", f"unknown boundary flag {flag}", token.span)
    if ident.value in draft.boundary_ids:
        raise StatementError(
            "duplicate-id", f"boundary {ident.value!r} is already defined", ident.span
        )
    draft.boundary_ids.add(ident.value)
    draft.spans[(ident.value, None)] = ident.span
    draft.boundaries.append(TrustBoundary(ident.value, name.value, trusted="trusted" in flags))


def _element_statement(draft: _Draft, tokens: list[Token]) -> None:
    kind = ELEMENT_KEYWORDS[tokens[0].value]
    ident = _expect(tokens, 1, "ident", "an element id")
    index = 2
    name = ident.value
    if index < len(tokens) and tokens[index].type == "string":
        name = tokens[index].value
        index += 1
    pairs, flags = _attributes(tokens, index)
    for key, _ in pairs.values():
        if key.value not in ELEMENT_ATTRIBUTES:
            raise StatementError("unknown-attribute", f"unknown attribute {key.value}", key.span)
    for flag, token in flags.items():
        if flag not in ELEMENT_FLAGS:
            raise StatementError("unknown-attribute", f"unknown flag {flag}", token.span)
    for required in ("role", "boundary"):
        if required not in pairs:
            raise StatementError(
                "missing-attribute",
                f"{tokens[0].value} {ident.value!r} needs {required}=...",
                ident.span,
            )
    _, role_value = pairs["role"]
    role = ROLES.get(role_value.value)
    if role is None:
        raise StatementError("unknown-role", f"unknown role {role_value.value!r}", role_value.span)
    _claim_node_id(draft, ident)
    _, boundary_value = pairs["boundary"]
    draft.spans[(ident.value, None)] = ident.span
    draft.spans[(ident.value, "role")] = role_value.span
    draft.spans[(ident.value, "boundary")] = boundary_value.span
    if "log" in flags:
        draft.spans[(ident.value, "log")] = flags["log"].span
    draft.elements.append(
        Element(
            id=ident.value,
            name=name,
            kind=kind,
            role=role,
            boundary=boundary_value.value,
            is_log="log" in flags,
            trusted="trusted" in flags,
        )
    )


def _flow_statement(draft: _Draft, tokens: list[Token]) -> None:
    ident = _expect(tokens, 1, "ident", "a flow id")
    src = _expect(tokens, 2, "ident", "a source element")
    _expect(tokens, 3, "arrow", "'->'")
    dst = _expect(tokens, 4, "ident", "a destination element")
    pairs, flags = _attributes(tokens, 5)
    if flags:
        flag, token = next(iter(flags.items()))
        raise StatementError("unknown-attribute", f"unknown flag {flag}", token.span)
    for key, _ in pairs.values():
        if key.value != "payload":
            raise StatementError("unknown-attribute", f"unknown attribute {key.value}", key.span)
    if "payload" not in pairs:
        raise StatementError("missing-attribute", f"flow {ident.value!r} needs payload=...", ident.span)
    _, payload_value = pairs["payload"]
    payload = PAYLOADS.get(payload_value.value)
    if payload is None:
        raise StatementError(
            "unknown-payload", f"unknown payload {payload_value.value!r}", payload_value.span
        )
    _claim_node_id(draft, ident)
    draft.spans[(ident.value, None)] = ident.span
    draft.spans[(ident.value, "src")] = src.span
    draft.spans[(ident.value, "dst")] = dst.span
    draft.spans[(ident.value, "payload")] = payload_value.span
    draft.flows.append(Flow(ident.value, src.value, dst.value, payload))


def _option_statement(draft: _Draft, tokens: list[Token]) -> None:
    name = _expect(tokens, 1, "ident", "an option name")
    _expect(tokens, 2, "equals", "'='")
    value = _expect(tokens, 3, "ident", "true or false")
    if len(tokens) > 4:
        raise StatementError("syntax", f"unexpected {tokens[4].value!r}", tokens[4].span)
    if name.value not in AnalysisOptions.names():
        raise StatementError("unknown-option", f"unknown option {name.value!r}", name.span)
    if name.value in draft.options:
        raise StatementError("duplicate-attribute", f"option {name.value} set twice", name.span)
    try:
        draft.options[name.value] = parse_bool(value.value)
    except ValueError:
        raise StatementError("bad-value", f"expected true or false, found {value.value!r}", value.span) from None


STATEMENTS = {
    "model": _model_statement,
    "boundary": _boundary_statement,
    "entity": _element_statement,
    "process": _element_statement,
    "store": _element_statement,
    "flow": _flow_statement,
    "option": _option_statement,
}


def parse(text: str, *, default_name: str = "untitled") -> ParseResult:
    draft = _Draft(name=default_name)
    diagnostics: list[Diagnostic] = []

    for _, tokens in iter_token_lines(text):
        if isinstance(tokens, LexError):
            diagnostics.append(Diagnostic("error", tokens.code, tokens.message, tokens.span))
            continue
        head = tokens[0]
        handler = STATEMENTS.get(head.value) if head.type == "ident" else None
        try:
            if handler is None:
                if head.type != "ident":
                    raise StatementError("syntax", "expected a statement keyword", head.span)
                raise StatementError(
                    "unknown-keyword",
                    f"unknown statement {head.value!r} (expected one of {', '.join(KEYWORDS)})",
                    head.span,
                )
            handler(draft, tokens)
        except StatementError as exc:
            diagnostics.append(Diagnostic("error", exc.code, exc.message, exc.span))

    if any(d.is_error for d in diagnostics):
        return ParseResult(None, tuple(diagnostics))

    model = draft.build()
    for diagnostic in validate(model):
        located = Diagnostic(
            diagnostic.severity,
            diagnostic.code,
            diagnostic.message,
            draft.locate(diagnostic),
            diagnostic.subject,
            diagnostic.attribute,
        )
        diagnostics.append(located)
    has_errors = any(d.is_error for d in diagnostics)
    return ParseResult(None if has_errors else model, tuple(diagnostics))


def parse_file(path: Path) -> ParseResult:
    raw = path.read_bytes()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        line = raw[: exc.start].count(b"\n") + 1
        return ParseResult(
            None, (Diagnostic("error", "bad-encoding", f"not UTF-8: {exc.reason}", SourceSpan(line, 1)),)
        )
    return parse(text, default_name=path.stem)
