"""Threat records produced by the rule engine."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from pipeline_threats.schema import (
    CONSEQUENCE_ORDER,
    ConsequenceClass,
    ThreatClass,
    ThreatKind,
)


def threat_id(
    kind: ThreatKind,
    attributed_to: str,
    spoofed: str | None,
    victim: str | None,
    via_flow: str | None,
) -> str:
    """Content hash of the kind and its participants; stable across model reordering."""
    key = "\x1f".join((kind.value, attributed_to, spoofed or "", victim or "", via_flow or ""))
    return hashlib.sha256(key.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class Threat:
    id: str
    kind: ThreatKind
    attributed_to: str
    consequences: frozenset[ConsequenceClass]
    evidence: str
    spoofed: str | None = None
    victim: str | None = None
    via_flow: str | None = None
    variant: str | None = None
    mitigation_refs: tuple[str, ...] = ()
    incident_refs: tuple[str, ...] = ()

    @classmethod
    def make(
        cls,
        kind: ThreatKind,
        attributed_to: str,
        consequences: frozenset[ConsequenceClass],
        evidence: str,
        *,
        spoofed: str | None = None,
        victim: str | None = None,
        via_flow: str | None = None,
        variant: str | None = None,
    ) -> Threat:
        return cls(
            id=threat_id(kind, attributed_to, spoofed, victim, via_flow),
            kind=kind,
            attributed_to=attributed_to,
            consequences=consequences,
            evidence=evidence,
            spoofed=spoofed,
            victim=victim,
            via_flow=via_flow,
            variant=variant,
        )

    @property
    def threat_class(self) -> ThreatClass:
        return self.kind.threat_class

    @property
    def ordered_consequences(self) -> tuple[ConsequenceClass, ...]:
        return tuple(c for c in CONSEQUENCE_ORDER if c in self.consequences)

    def sort_key(self) -> tuple[str, str, str, str, str]:
        return (
            self.attributed_to,
            self.kind.value,
            self.spoofed or "",
            self.victim or "",
            self.via_flow or "",
        )

    def summary(self) -> str:
        consequences = ", ".join(c.value for c in self.ordered_consequences)
        return f"{self.kind.value} @ {self.attributed_to}: {consequences}"
