"""Knowledge base: mitigations, documented incidents and their citations."""

from pipeline_threats.kb.catalog import (
    BibliographyEntry,
    IncidentEntry,
    KnowledgeBase,
    MitigationEntry,
    UnknownStageError,
    load_knowledge_base,
)
from pipeline_threats.kb.records import CatalogError

__all__ = [
    "BibliographyEntry",
    "CatalogError",
    "IncidentEntry",
    "KnowledgeBase",
    "MitigationEntry",
    "UnknownStageError",
    "load_knowledge_base",
]
