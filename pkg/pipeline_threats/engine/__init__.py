"""Rule engine: applicability, consequences, threat rules and aggregation."""

from pipeline_threats.engine.aggregate import Aggregation, MatrixRow, SummaryRow, aggregate_rows
from pipeline_threats.engine.consequences import STORE_CONTEXT, consequence_of
from pipeline_threats.engine.rules import enumerate_threats
from pipeline_threats.engine.stride import applicable_classes, integrity_filter
from pipeline_threats.engine.threat import Threat, threat_id

__all__ = [
    "STORE_CONTEXT",
    "Aggregation",
    "MatrixRow",
    "SummaryRow",
    "Threat",
    "aggregate_rows",
    "applicable_classes",
    "consequence_of",
    "enumerate_threats",
    "integrity_filter",
    "threat_id",
]
