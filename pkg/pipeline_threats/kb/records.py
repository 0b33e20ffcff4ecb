"""Reader for the ``key: value`` block format used by the data files.

Blocks are separated by a line holding ``---``. Lines starting with ``#`` are
comments; indented lines continue the previous value; keys may repeat.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

SEPARATOR = "---"


class CatalogError(ValueError):
    def __init__(self, path: Path | str, line: int, message: str) -> None:
        super().__init__(f"{path}:{line}: {message}")
        self.path = str(path)
        self.line = line
        self.message = message


@dataclass(frozen=True)
class Record:
    path: str
    line: int
    fields: tuple[tuple[str, str], ...]

    def get(self, key: str, default: str = "") -> str:
        for name, value in self.fields:
            if name == key:
                return value
        return default

    def require(self, key: str) -> str:
        value = self.get(key)
        if not value:
            raise CatalogError(self.path, self.line, f"record is missing {key!r}")
        return value

    def all(self, key: str) -> list[str]:
        return [value for name, value in self.fields if name == key and value]

    def keys(self) -> set[str]:
        return {name for name, _ in self.fields}


def iter_records(text: str, path: Path | str = "<data>") -> Iterator[Record]:
    fields: list[list[str]] = []
    start = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip()
        if line.startswith("#"):
            continue
        if line.strip() == SEPARATOR:
            if fields:
                yield Record(str(path), start, tuple((k, v) for k, v in fields))
            fields = []
            continue
        if not line.strip():
            continue
        if line[0] in " \t":
            if not fields:
                raise CatalogError(path, lineno, "continuation line outside a field")
            key, value = fields[-1]
            fields[-1] = [key, f"{value} {line.strip()}".strip()]
            continue
        key, sep, value = line.partition(":")
        if not sep or not key.strip() or " " in key.strip():
            raise CatalogError(path, lineno, f"expected 'key: value', found {line!r}")
        if not fields:
            start = lineno
        fields.append([key.strip(), value.strip()])
    if fields:
        yield Record(str(path), start, tuple((k, v) for k, v in fields))


def read_records(path: Path) -> list[Record]:
    return list(iter_records(path.read_text(encoding="utf-8"), path))
