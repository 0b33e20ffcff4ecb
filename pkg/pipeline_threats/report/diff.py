"""Compare two threat lists by threat id."""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass
from typing import Any

from pipeline_threats.engine import Threat


@dataclass(frozen=True)
class DiffEntry:
    id: str
    summary: str


@dataclass(frozen=True)
class ThreatDiff:
    added: tuple[DiffEntry, ...] = ()
    removed: tuple[DiffEntry, ...] = ()
    changed: tuple[DiffEntry, ...] = ()

    @property
    def is_empty(self) -> bool:
        return not (self.added or self.removed or self.changed)

    def lines(self) -> list[str]:
        return [
            *(f"+ {e.id} {e.summary}" for e in self.added),
            *(f"- {e.id} {e.summary}" for e in self.removed),
            *(f"~ {e.id} {e.summary}" for e in self.changed),
        ]

    def as_dict(self) -> dict[str, Any]:
        return {
            name: [{"id": e.id, "summary": e.summary} for e in entries]
            for name, entries in (
                ("added", self.added),
                ("removed", self.removed),
                ("changed", self.changed),
            )
        }


def _changed_summary(before: Threat, after: Threat) -> str:
    old = ", ".join(c.value for c in before.ordered_consequences)
    new = ", ".join(c.value for c in after.ordered_consequences)
    return f"{after.kind.value} @ {after.attributed_to}: {old} → {new}"


def diff(a: Iterable[Threat], b: Iterable[Threat]) -> ThreatDiff:
    before = {t.id: t for t in a}
    after = {t.id: t for t in b}

    def entries(ids: Iterable[str], source: dict[str, Threat]) -> tuple[DiffEntry, ...]:
        threats = sorted((source[i] for i in ids), key=Threat.sort_key)
        return tuple(DiffEntry(t.id, t.summary()) for t in threats)

    shared = [i for i in before if i in after and before[i].consequences != after[i].consequences]
    changed = sorted((after[i] for i in shared), key=Threat.sort_key)
    return ThreatDiff(
        added=entries(after.keys() - before.keys(), after),
        removed=entries(before.keys() - after.keys(), before),
        changed=tuple(DiffEntry(t.id, _changed_summary(before[t.id], t)) for t in changed),
    )
