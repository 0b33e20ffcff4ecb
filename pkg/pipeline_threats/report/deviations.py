"""Ledger of matrix cells where the engine knowingly departs from the published tables."""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from pathlib import Path

from pipeline_threats.kb.catalog import resolve_data_dir
from pipeline_threats.kb.records import CatalogError, Record, read_records
from pipeline_threats.schema import ConsequenceClass

DEVIATIONS_FILE = "deviations.txt"
CELL_SEPARATOR = " | "

Matrix = Mapping[str, Mapping[ConsequenceClass, str]]


@dataclass(frozen=True)
class DeviationCell:
    row: str
    consequence: ConsequenceClass
    paper_value: str
    engine_value: str

    @property
    def cell(self) -> str:
        return f"{self.row}{CELL_SEPARATOR}{self.consequence.value}"


@dataclass(frozen=True)
class Deviation:
    id: str
    model: str
    table: str
    cells: tuple[DeviationCell, ...]
    justification: str
    quotes: tuple[str, ...]

    def applies_to(self, model_name: str, matrix: Matrix) -> bool:
        """True when ``matrix`` still holds the engine value in every listed cell."""
        if model_name != self.model:
            return False
        for cell in self.cells:
            row = matrix.get(cell.row)
            if row is None or row.get(cell.consequence, "") != cell.engine_value:
                return False
        return True


def _cell(record: Record, raw: str) -> tuple[str, ConsequenceClass]:
    row, sep, column = raw.rpartition(CELL_SEPARATOR)
    if not sep or not row:
        raise CatalogError(record.path, record.line, f"cell must read 'row | consequence': {raw!r}")
    try:
        return row, ConsequenceClass(column.strip())
    except ValueError:
        raise CatalogError(record.path, record.line, f"unknown consequence {column!r}") from None


def _cells(record: Record) -> tuple[DeviationCell, ...]:
    # cell / paper_value / engine_value come in order; values may be empty.
    cells: list[DeviationCell] = []
    pending: dict[str, str] = {}
    for key, value in record.fields:
        if key == "cell":
            if pending:
                raise CatalogError(record.path, record.line, f"incomplete cell {pending['cell']!r}")
            pending = {"cell": value}
        elif key in ("paper_value", "engine_value"):
            if not pending or key in pending:
                raise CatalogError(record.path, record.line, f"{key} without a preceding cell")
            pending[key] = value
            if len(pending) == 3:
                row, consequence = _cell(record, pending["cell"])
                cells.append(
                    DeviationCell(row, consequence, pending["paper_value"], pending["engine_value"])
                )
                pending = {}
    if pending or not cells:
        raise CatalogError(record.path, record.line, "every deviation needs complete cells")
    return tuple(cells)


def _deviation(record: Record) -> Deviation:
    return Deviation(
        id=record.require("id"),
        model=record.require("model"),
        table=record.require("table"),
        cells=_cells(record),
        justification=record.require("justification"),
        quotes=tuple(record.all("quote")),
    )


def load_deviations(data_dir: Path | None = None) -> tuple[Deviation, ...]:
    path = resolve_data_dir(data_dir) / DEVIATIONS_FILE
    if not path.is_file():
        return ()
    deviations = tuple(_deviation(r) for r in read_records(path))
    seen: set[str] = set()
    for deviation in deviations:
        if deviation.id in seen:
            raise CatalogError(path, 1, f"duplicate id {deviation.id!r}")
        seen.add(deviation.id)
    return deviations


def applied_deviations(
    deviations: Iterable[Deviation], model_name: str, matrix: Matrix
) -> tuple[Deviation, ...]:
    return tuple(d for d in deviations if d.applies_to(model_name, matrix))
