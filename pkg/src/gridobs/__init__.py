"""AHP-weighted observability scoring for power-grid telemetry signals."""

from .ahp import (
    ComparisonMatrix,
    ConsistencyReport,
    PriorityVector,
    Questionnaire,
    WeightTables,
    aggregate_experts,
    build_weight_tables,
    consistency,
    derive_priorities,
    signal_weight,
)
from .errors import GridObsError
from .scoring import (
    InvalidityPolicy,
    ObservabilityScore,
    SnapshotRecord,
    compare_snapshots,
    is_invalid,
    score_by_area,
    score_by_station,
    unweighted_observability,
    weighted_observability,
)
from .taxonomy import (
    APPLICABILITY,
    ComponentKind,
    QuantityKind,
    SignalDescriptor,
    ValidityTag,
    parse_tag,
    validate_pair,
)

__version__ = "0.1.0"

__all__ = [
    "APPLICABILITY",
    "ComparisonMatrix",
    "ComponentKind",
    "ConsistencyReport",
    "GridObsError",
    "InvalidityPolicy",
    "ObservabilityScore",
    "PriorityVector",
    "Questionnaire",
    "QuantityKind",
    "SignalDescriptor",
    "SnapshotRecord",
    "ValidityTag",
    "WeightTables",
    "aggregate_experts",
    "build_weight_tables",
    "compare_snapshots",
    "consistency",
    "derive_priorities",
    "is_invalid",
    "parse_tag",
    "score_by_area",
    "score_by_station",
    "signal_weight",
    "unweighted_observability",
    "validate_pair",
    "weighted_observability",
]
