"""Mitigation, incident and bibliography catalogs."""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

from pipeline_threats.kb.records import CatalogError, Record, read_records
from pipeline_threats.schema import PIPELINE_STAGES, ThreatKind

PACKAGE_DIR = Path(__file__).resolve().parents[1]
DEFAULT_DATA_DIR = PACKAGE_DIR / "data"
ENV_DATA_DIR = "PIPELINE_THREATS_DATA_DIR"

MITIGATIONS_FILE = "mitigations.txt"
INCIDENTS_FILE = "incidents.txt"
BIBLIOGRAPHY_FILE = "bibliography.txt"

KINDS = {k.value: k for k in ThreatKind}


class UnknownStageError(ValueError):
    pass


@dataclass(frozen=True)
class MitigationEntry:
    id: str
    name: str
    description: str
    applies_to: frozenset[ThreatKind]
    caveats: str
    citation: str


@dataclass(frozen=True)
class IncidentEntry:
    id: str
    name: str
    year: int
    stage: str
    threat_kinds: frozenset[ThreatKind]
    summary: str
    citation_key: str
    basis: str


@dataclass(frozen=True)
class BibliographyEntry:
    key: str
    year: int
    topic: str


def resolve_data_dir(cli_dir: Path | None = None) -> Path:
    if cli_dir is not None:
        return cli_dir
    env_dir = os.environ.get(ENV_DATA_DIR, "").strip()
    return Path(env_dir) if env_dir else DEFAULT_DATA_DIR


def _kinds(record: Record, key: str) -> frozenset[ThreatKind]:
    values = record.all(key)
    if not values:
        raise CatalogError(record.path, record.line, f"record is missing {key!r}")
    unknown = [v for v in values if v not in KINDS]
    if unknown:
        raise CatalogError(record.path, record.line, f"unknown threat kind {unknown[0]!r}")
    return frozenset(KINDS[v] for v in values)


def _year(record: Record) -> int:
    raw = record.require("year")
    try:
        return int(raw)
    except ValueError:
        raise CatalogError(record.path, record.line, f"year is not a number: {raw!r}") from None


def _unique(records: list[Record], key: str) -> None:
    seen: set[str] = set()
    for record in records:
        value = record.require(key)
        if value in seen:
            raise CatalogError(record.path, record.line, f"duplicate {key} {value!r}")
        seen.add(value)


def _mitigation(record: Record) -> MitigationEntry:
    return MitigationEntry(
        id=record.require("id"),
        name=record.require("name"),
        description=record.require("description"),
        applies_to=_kinds(record, "applies_to"),
        caveats=record.get("caveats"),
        citation=record.require("citation"),
    )


def _incident(record: Record) -> IncidentEntry:
    stage = record.require("stage")
    if stage not in PIPELINE_STAGES:
        raise CatalogError(record.path, record.line, f"unknown pipeline stage {stage!r}")
    return IncidentEntry(
        id=record.require("id"),
        name=record.require("name"),
        year=_year(record),
        stage=stage,
        threat_kinds=_kinds(record, "threat_kinds"),
        summary=record.require("summary"),
        citation_key=record.require("citation_key"),
        basis=record.require("basis"),
    )


def _reference(record: Record) -> BibliographyEntry:
    return BibliographyEntry(key=record.require("key"), year=_year(record), topic=record.require("topic"))


@dataclass(frozen=True)
class KnowledgeBase:
    mitigations: tuple[MitigationEntry, ...]
    incidents: tuple[IncidentEntry, ...]
    bibliography: tuple[BibliographyEntry, ...]

    def mitigations_for(self, kind: ThreatKind) -> list[MitigationEntry]:
        return [m for m in self.mitigations if kind in m.applies_to]

    def incidents_for(self, selector: ThreatKind | str) -> list[IncidentEntry]:
        """Incidents for a threat kind, or for a pipeline stage label."""
        if isinstance(selector, ThreatKind):
            return [i for i in self.incidents if selector in i.threat_kinds]
        if selector in KINDS:
            return self.incidents_for(KINDS[selector])
        if selector not in PIPELINE_STAGES:
            raise UnknownStageError(
                f"unknown pipeline stage {selector!r} (expected one of {', '.join(PIPELINE_STAGES)})"
            )
        return [i for i in self.incidents if i.stage == selector]

    def bibliography_entry(self, key: str) -> BibliographyEntry:
        for entry in self.bibliography:
            if entry.key == key:
                return entry
        raise KeyError(key)


def load_knowledge_base(data_dir: Path | None = None) -> KnowledgeBase:
    """Load and cross-check the three catalogs under ``data_dir``."""
    data_dir = resolve_data_dir(data_dir)
    paths = {name: data_dir / name for name in (MITIGATIONS_FILE, INCIDENTS_FILE, BIBLIOGRAPHY_FILE)}
    for path in paths.values():
        if not path.is_file():
            raise FileNotFoundError(f"catalog file not found: {path}")

    mitigation_records = read_records(paths[MITIGATIONS_FILE])
    incident_records = read_records(paths[INCIDENTS_FILE])
    reference_records = read_records(paths[BIBLIOGRAPHY_FILE])
    _unique(mitigation_records, "id")
    _unique(incident_records, "id")
    _unique(reference_records, "key")

    kb = KnowledgeBase(
        mitigations=tuple(_mitigation(r) for r in mitigation_records),
        incidents=tuple(_incident(r) for r in incident_records),
        bibliography=tuple(_reference(r) for r in reference_records),
    )

    uncovered = [k.value for k in ThreatKind if not kb.mitigations_for(k)]
    if uncovered:
        raise CatalogError(
            paths[MITIGATIONS_FILE], 1, f"no mitigation for threat kinds: {', '.join(uncovered)}"
        )
    keys = {entry.key for entry in kb.bibliography}
    for record, citation in [(r, r.require("citation")) for r in mitigation_records] + [
        (r, r.require("citation_key")) for r in incident_records
    ]:
        if citation not in keys:
            raise CatalogError(record.path, record.line, f"unresolved citation key {citation!r}")
    return kb
