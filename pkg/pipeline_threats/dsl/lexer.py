"""Line-oriented tokenizer for ``.dfd`` files."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Literal

from pipeline_threats.model import SourceSpan

TokenType = Literal["ident", "string", "arrow", "equals"]

IDENT_RE = re.compile(r"[A-Za-z_](?:[A-Za-z0-9_]|-(?!>))*")
SPACE_CHARS = frozenset(" \t")
ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "r": "\r", "t": "\t"}


class LexError(ValueError):
    def __init__(self, code: str, message: str, span: SourceSpan) -> None:
        super().__init__(message)
        self.code = code
        self.message = message
        self.span = span


@dataclass(frozen=True)
class Token:
    type: TokenType
    value: str
    span: SourceSpan


def split_lines(text: str) -> list[str]:
    """Split on LF, CRLF or CR; a leading BOM is dropped."""
    if text.startswith("\ufeff"):
        text = text[1:]
    return re.split(r"\r\n|\r|\n", text)


def _read_string(line: str, start: int, lineno: int) -> tuple[str, int]:
    pos = start + 1
    chars: list[str] = []
    while pos < len(line):
        ch = line[pos]
        if ch == "\\":
            nxt = line[pos + 1] if pos + 1 < len(line) else ""
            if nxt not in ESCAPES:
                raise LexError(
                    "bad-token",
                    f"unknown escape sequence \\{nxt}" if nxt else "dangling backslash",
                    SourceSpan(lineno, pos + 1, 2 if nxt else 1),
                )
            chars.append(ESCAPES[nxt])
            pos += 2
            continue
        if ch == '"':
            return "".join(chars), pos + 1
        chars.append(ch)
        pos += 1
    raise LexError(
        "unterminated-string",
        "string is not terminated",
        SourceSpan(lineno, start + 1, max(1, len(line) - start)),
    )


def tokenize_line(line: str, lineno: int) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    while pos < len(line):
        ch = line[pos]
        if ch in SPACE_CHARS:
            pos += 1
            continue
        if ch == "#":
            break
        if ch == '"':
            value, end = _read_string(line, pos, lineno)
            tokens.append(Token("string", value, SourceSpan(lineno, pos + 1, end - pos)))
            pos = end
            continue
        if line.startswith("->", pos):
            tokens.append(Token("arrow", "->", SourceSpan(lineno, pos + 1, 2)))
            pos += 2
            continue
        if ch == "=":
            tokens.append(Token("equals", "=", SourceSpan(lineno, pos + 1, 1)))
            pos += 1
            continue
        match = IDENT_RE.match(line, pos)
        if match is None:
            raise LexError("bad-token", f"unexpected character {ch!r}", SourceSpan(lineno, pos + 1, 1))
        tokens.append(Token("ident", match.group(), SourceSpan(lineno, pos + 1, match.end() - pos)))
        pos = match.end()
    return tokens


def iter_token_lines(text: str) -> Iterator[tuple[int, list[Token] | LexError]]:
    """Yield ``(line number, tokens)`` per non-blank line, or the line's lexical error."""
    for lineno, line in enumerate(split_lines(text), start=1):
        try:
            tokens = tokenize_line(line, lineno)
        except LexError as exc:
            yield lineno, exc
            continue
        if tokens:
            yield lineno, tokens
