"""Priority derivation from pairwise-comparison matrices.

Implements the ratio-judgment workflow: validate a reciprocal comparison
matrix, derive a priority vector (row geometric means by default, principal
eigenvector as an alternative), check judgment consistency against Saaty's
random indices, aggregate several experts, and assemble the two weight
tables whose cell products give each signal's operational weight.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AggregationError,
    IncompleteQuestionnaireError,
    MatrixValidationError,
    TableLookupError,
    TaxonomyError,
    UnsupportedSizeError,
)
from .taxonomy import (
    APPLICABILITY,
    ComponentKind,
    QuantityKind,
    SignalDescriptor,
    parse_component,
    parse_quantity,
)

# Expected consistency index of random reciprocal matrices (Saaty), n = 1..10.
RANDOM_INDEX = {1: 0.0, 2: 0.0, 3: 0.58, 4: 0.90, 5: 1.12, 6: 1.24,
                7: 1.32, 8: 1.41, 9: 1.45, 10: 1.49}

DEFAULT_CR_THRESHOLD = 0.10

_RECIPROCITY_RTOL = 1e-12


@dataclass(frozen=True)
class ComparisonMatrix:
    """Positive reciprocal judgment matrix over an ordered list of items."""

    items: tuple[str, ...]
    entries: np.ndarray

    def __init__(self, items, entries):
        items = tuple(items)
        a = np.asarray(entries, dtype=float)
        n = len(items)
        if n < 2:
            raise MatrixValidationError("need at least 2 items to compare")
        if len(set(items)) != n:
            raise MatrixValidationError(f"duplicate item labels in {items!r}")
        if a.shape != (n, n):
            raise MatrixValidationError(
                f"entries shape {a.shape} does not match {n} items"
            )
        for i in range(n):
            if a[i, i] != 1.0:
                raise MatrixValidationError(
                    f"diagonal entry [{i}][{i}] = {a[i, i]!r} must be exactly 1"
                )
            for j in range(n):
                v = a[i, j]
                if not np.isfinite(v) or v <= 0.0:
                    raise MatrixValidationError(
                        f"entry [{i}][{j}] = {v!r} must be strictly positive and finite"
                    )
        for i in range(n):
            for j in range(i + 1, n):
                prod = a[i, j] * a[j, i]
                if abs(prod - 1.0) > _RECIPROCITY_RTOL:
                    raise MatrixValidationError(
                        f"reciprocity violated at [{i}][{j}]: "
                        f"{a[i, j]!r} * {a[j, i]!r} = {prod!r}"
                    )
        a.setflags(write=False)
        object.__setattr__(self, "items", items)
        object.__setattr__(self, "entries", a)

    @property
    def n(self) -> int:
        return len(self.items)

    @classmethod
    def from_judgments(cls, items, judgments) -> "ComparisonMatrix":
        """Build from strict upper-triangle judgments [(row, col, value), ...].

        The diagonal and the reciprocal lower triangle are implied. Every
        upper-triangle cell must be covered exactly once.
        """
        items = tuple(items)
        n = len(items)
        a = np.ones((n, n), dtype=float)
        seen = set()
        for row, col, value in judgments:
            if not (0 <= row < col < n):
                raise MatrixValidationError(
                    f"judgment ({row}, {col}) is not a strict upper-triangle cell "
                    f"for {n} items"
                )
            if (row, col) in seen:
                raise MatrixValidationError(f"duplicate judgment for cell ({row}, {col})")
            value = float(value)
            if not np.isfinite(value) or value <= 0.0:
                raise MatrixValidationError(
                    f"judgment ({row}, {col}) = {value!r} must be strictly positive"
                )
            seen.add((row, col))
            a[row, col] = value
            a[col, row] = 1.0 / value
        missing = [(i, j) for i in range(n) for j in range(i + 1, n) if (i, j) not in seen]
        if missing:
            raise MatrixValidationError(f"missing judgments for cells {missing}")
        return cls(items, a)


@dataclass(frozen=True)
class PriorityVector:
    """Weights over the source matrix's items, normalized to sum 100."""

    items: tuple[str, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        if len(self.items) != len(self.weights):
            raise AggregationError("items and weights length mismatch")
        total = sum(self.weights)
        if abs(total - 100.0) > 1e-9:
            raise AggregationError(f"weights sum to {total!r}, expected 100")
        if any(w < 0 for w in self.weights):
            raise AggregationError("weights must be non-negative")

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.items, self.weights))


@dataclass(frozen=True)
class ConsistencyReport:
    lambda_max: float
    consistency_index: float
    consistency_ratio: float
    acceptable: bool


def _normalize_to_100(values: np.ndarray) -> tuple[float, ...]:
    return tuple(100.0 * values / values.sum())


def derive_priorities(matrix: ComparisonMatrix, method: str = "geometric-mean") -> PriorityVector:
    """Derive the priority vector of a comparison matrix.

    "geometric-mean": normalized row geometric means (exact on consistent
    matrices). "eigenvector": principal right eigenvector, offered for
    comparison; the two agree exactly on consistent matrices.
    """
    a = matrix.entries
    n = matrix.n
    if method == "geometric-mean":
        gm = np.prod(a, axis=1) ** (1.0 / n)
        weights = _normalize_to_100(gm)
    elif method == "eigenvector":
        eigvals, eigvecs = np.linalg.eig(a)
        principal = np.argmax(eigvals.real)
        vec = np.abs(eigvecs[:, principal].real)
        weights = _normalize_to_100(vec)
    else:
        raise ValueError(f"unknown derivation method: {method!r}")
    return PriorityVector(matrix.items, weights)


def consistency(matrix: ComparisonMatrix, priorities: PriorityVector,
                threshold: float = DEFAULT_CR_THRESHOLD) -> ConsistencyReport:
    """Saaty consistency check of a matrix given its priority vector.

    lambda_max is the mean of (A w)_i / w_i; CI = (lambda_max - n)/(n - 1)
    for n >= 3 and 0 for n = 2 (2x2 reciprocal matrices are always
    consistent); CR = CI / RI(n).
    """
    n = matrix.n
    if n not in RANDOM_INDEX or n < 2:
        raise UnsupportedSizeError(
            f"consistency check supports sizes 2..10, got {n}"
        )
    if priorities.items != matrix.items:
        raise AggregationError("priority vector does not match matrix items")
    w = np.array(priorities.weights) / 100.0
    aw = matrix.entries @ w
    lambda_max = float(np.mean(aw / w))
    if n == 2:
        ci = 0.0
    else:
        # lambda_max >= n holds exactly for reciprocal matrices; clamp the
        # float noise so CI/CR stay non-negative.
        ci = max(0.0, (lambda_max - n) / (n - 1))
    ri = RANDOM_INDEX[n]
    cr = ci / ri if ri > 0.0 else 0.0
    return ConsistencyReport(lambda_max, ci, cr, cr <= threshold)


def aggregate_experts(vectors, expert_weights=None) -> PriorityVector:
    """Average several experts' priority vectors into one.

    Plain arithmetic mean by default; a weighted mean when expert_weights is
    given. The result is renormalized to sum 100.
    """
    vectors = list(vectors)
    if not vectors:
        raise AggregationError("no priority vectors to aggregate")
    items = vectors[0].items
    for v in vectors[1:]:
        if v.items != items:
            raise AggregationError(
                f"item lists differ: {items!r} vs {v.items!r}"
            )
    if expert_weights is None:
        ew = np.ones(len(vectors))
    else:
        ew = np.asarray(list(expert_weights), dtype=float)
        if ew.shape != (len(vectors),):
            raise AggregationError(
                f"{len(vectors)} vectors but {ew.size} expert weights"
            )
        if np.any(ew <= 0):
            raise AggregationError("expert weights must be positive")
    stacked = np.array([v.weights for v in vectors])
    mean = ew @ stacked / ew.sum()
    return PriorityVector(items, _normalize_to_100(mean))


def combine_judgments(matrices, expert_weights=None) -> ComparisonMatrix:
    """Element-wise (weighted) geometric mean of several experts' matrices.

    The alternative aggregation route: combine the raw judgments first, then
    derive a single priority vector. The result is again reciprocal.
    """
    matrices = list(matrices)
    if not matrices:
        raise AggregationError("no matrices to combine")
    items = matrices[0].items
    for m in matrices[1:]:
        if m.items != items:
            raise AggregationError(f"item lists differ: {items!r} vs {m.items!r}")
    if expert_weights is None:
        ew = np.ones(len(matrices))
    else:
        ew = np.asarray(list(expert_weights), dtype=float)
        if ew.shape != (len(matrices),) or np.any(ew <= 0):
            raise AggregationError("expert weights must be positive, one per matrix")
    ew = ew / ew.sum()
    log_sum = sum(w * np.log(m.entries) for w, m in zip(ew, matrices))
    combined = np.exp(log_sum)
    n = len(items)
    # Exponentials drift off exact reciprocity; rebuild from the upper triangle.
    a = np.ones((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            a[i, j] = combined[i, j]
            a[j, i] = 1.0 / combined[i, j]
    return ComparisonMatrix(items, a)


# --- comparison contexts and questionnaires -------------------------------

QUANTITIES_WITHIN_COMPONENT = "quantities_within_component"
COMPONENTS_WITHIN_QUANTITY = "components_within_quantity"


@dataclass(frozen=True)
class ComparisonContext:
    """One questionnaire context: either the quantities of one component, or
    the components reporting one quantity."""

    kind: str
    subject: ComponentKind | QuantityKind

    def __post_init__(self):
        if self.kind == QUANTITIES_WITHIN_COMPONENT:
            if not isinstance(self.subject, ComponentKind):
                raise TaxonomyError(f"{self.kind} needs a component subject")
        elif self.kind == COMPONENTS_WITHIN_QUANTITY:
            if not isinstance(self.subject, QuantityKind):
                raise TaxonomyError(f"{self.kind} needs a quantity subject")
        else:
            raise TaxonomyError(f"unknown context kind: {self.kind!r}")

    def expected_items(self) -> frozenset[str]:
        if self.kind == QUANTITIES_WITHIN_COMPONENT:
            return frozenset(q.name for q in APPLICABILITY[self.subject])
        return frozenset(
            c.name for c in ComponentKind if self.subject in APPLICABILITY[c]
        )

    def label(self) -> str:
        return f"{self.kind}:{self.subject.name}"

    def to_json(self) -> dict:
        if self.kind == QUANTITIES_WITHIN_COMPONENT:
            return {"kind": self.kind, "component": self.subject.name}
        return {"kind": self.kind, "quantity": self.subject.name}

    @classmethod
    def from_json(cls, obj: dict) -> "ComparisonContext":
        kind = obj.get("kind")
        if kind == QUANTITIES_WITHIN_COMPONENT:
            return cls(kind, parse_component(obj["component"]))
        if kind == COMPONENTS_WITHIN_QUANTITY:
            return cls(kind, parse_quantity(obj["quantity"]))
        raise TaxonomyError(f"unknown context kind: {kind!r}")


def required_contexts() -> tuple[ComparisonContext, ...]:
    """All 11 contexts a complete questionnaire must cover (6 components + 5 quantities)."""
    comps = tuple(
        ComparisonContext(QUANTITIES_WITHIN_COMPONENT, c) for c in ComponentKind
    )
    quants = tuple(
        ComparisonContext(COMPONENTS_WITHIN_QUANTITY, q) for q in QuantityKind
    )
    return comps + quants


@dataclass(frozen=True)
class Questionnaire:
    """One expert's full set of comparison matrices, one per context."""

    expert_id: str
    matrices: dict[ComparisonContext, ComparisonMatrix] = field(default_factory=dict)

    @classmethod
    def from_json(cls, obj: dict) -> "Questionnaire":
        expert_id = obj.get("expert_id")
        if not expert_id or not isinstance(expert_id, str):
            raise MatrixValidationError("questionnaire needs a non-empty expert_id")
        matrices = {}
        for entry in obj.get("matrices", []):
            ctx = ComparisonContext.from_json(entry["context"])
            items = entry["items"]
            expected = ctx.expected_items()
            if set(items) != expected:
                raise MatrixValidationError(
                    f"context {ctx.label()} items {sorted(items)} != "
                    f"expected {sorted(expected)}"
                )
            judgments = [
                (j["row"], j["col"], j["value"]) for j in entry["judgments"]
            ]
            matrix = ComparisonMatrix.from_judgments(items, judgments)
            if ctx in matrices:
                raise MatrixValidationError(
                    f"duplicate context {ctx.label()} for expert {expert_id}"
                )
            matrices[ctx] = matrix
        return cls(expert_id, matrices)

    def to_json(self) -> dict:
        out = {"expert_id": self.expert_id, "matrices": []}
        for ctx, m in self.matrices.items():
            judgments = [
                {"row": i, "col": j, "value": m.entries[i, j]}
                for i in range(m.n)
                for j in range(i + 1, m.n)
            ]
            out["matrices"].append(
                {"context": ctx.to_json(), "items": list(m.items), "judgments": judgments}
            )
        return out

    def missing_contexts(self) -> list[ComparisonContext]:
        return [c for c in required_contexts() if c not in self.matrices]


# --- weight tables ---------------------------------------------------------


@dataclass(frozen=True)
class WeightTables:
    """The two averaged rating tables.

    m_table: per component, how important each of its quantities is.
    n_table: per quantity, how important each reporting component is.
    A signal's weight is the product of its two cells.
    """

    m_table: dict[ComponentKind, dict[QuantityKind, float]]
    n_table: dict[QuantityKind, dict[ComponentKind, float]]

    def __post_init__(self):
        for c in ComponentKind:
            cells = self.m_table.get(c, {})
            if set(cells) != APPLICABILITY[c]:
                raise TableLookupError(
                    f"m_table[{c.name}] must cover exactly "
                    f"{sorted(q.name for q in APPLICABILITY[c])}, "
                    f"got {sorted(q.name for q in cells)}"
                )
        for q in QuantityKind:
            expected = {c for c in ComponentKind if q in APPLICABILITY[c]}
            cells = self.n_table.get(q, {})
            if set(cells) != expected:
                raise TableLookupError(
                    f"n_table[{q.name}] must cover exactly "
                    f"{sorted(c.name for c in expected)}, "
                    f"got {sorted(c.name for c in cells)}"
                )
        for c, cells in self.m_table.items():
            for q, v in cells.items():
                if not (v > 0):
                    raise TableLookupError(
                        f"m_table[{c.name}][{q.name}] = {v!r} must be positive"
                    )
        for q, cells in self.n_table.items():
            for c, v in cells.items():
                if not (v > 0):
                    raise TableLookupError(
                        f"n_table[{q.name}][{c.name}] = {v!r} must be positive"
                    )

    def column_sums(self) -> dict[str, float]:
        sums = {f"m:{c.name}": sum(cells.values()) for c, cells in self.m_table.items()}
        sums.update(
            {f"n:{q.name}": sum(cells.values()) for q, cells in self.n_table.items()}
        )
        return sums

    def check_column_sums(self, tolerance: float) -> None:
        for label, total in self.column_sums().items():
            if abs(total - 100.0) > tolerance:
                raise TableLookupError(
                    f"column {label} sums to {total!r}, outside 100 +/- {tolerance}"
                )

    def scaled(self, factor: float) -> "WeightTables":
        return WeightTables(
            {c: {q: v * factor for q, v in cells.items()} for c, cells in self.m_table.items()},
            {q: {c: v * factor for c, v in cells.items()} for q, cells in self.n_table.items()},
        )

    def to_json(self) -> dict:
        return {
            "m_table": {
                c.name: {
                    q.name: self.m_table[c][q]
                    for q in QuantityKind if q in self.m_table[c]
                }
                for c in ComponentKind
            },
            "n_table": {
                q.name: {
                    c.name: self.n_table[q][c]
                    for c in ComponentKind if c in self.n_table[q]
                }
                for q in QuantityKind
            },
        }

    @classmethod
    def from_json(cls, obj: dict) -> "WeightTables":
        m = {
            parse_component(c): {parse_quantity(q): float(v) for q, v in cells.items()}
            for c, cells in obj["m_table"].items()
        }
        n = {
            parse_quantity(q): {parse_component(c): float(v) for c, v in cells.items()}
            for q, cells in obj["n_table"].items()
        }
        return cls(m, n)

    @classmethod
    def uniform(cls) -> "WeightTables":
        """Indifference tables: each column split evenly over its items."""
        m = {
            c: {q: 100.0 / len(APPLICABILITY[c]) for q in APPLICABILITY[c]}
            for c in ComponentKind
        }
        n = {}
        for q in QuantityKind:
            comps = [c for c in ComponentKind if q in APPLICABILITY[c]]
            n[q] = {c: 100.0 / len(comps) for c in comps}
        return cls(m, n)

    @classmethod
    def constant(cls, value: float = 1.0) -> "WeightTables":
        """Every cell the same value; gives every signal an equal weight."""
        m = {c: {q: value for q in APPLICABILITY[c]} for c in ComponentKind}
        n = {
            q: {c: value for c in ComponentKind if q in APPLICABILITY[c]}
            for q in QuantityKind
        }
        return cls(m, n)


def signal_weight(descriptor: SignalDescriptor, tables: WeightTables) -> float:
    """Operational weight of one signal: product of its two table cells."""
    c, q = descriptor.component, descriptor.quantity
    try:
        m = tables.m_table[c][q]
        n = tables.n_table[q][c]
    except KeyError:
        raise TableLookupError(
            f"no weight for ({c.name}, {q.name}) in the tables"
        ) from None
    return m * n


@dataclass(frozen=True)
class ContextConsistency:
    """Consistency of one expert's matrix in one context."""

    context: ComparisonContext
    expert_id: str
    report: ConsistencyReport


@dataclass(frozen=True)
class WeightTableBuild:
    """build_weight_tables output: the tables plus per-matrix consistency."""

    tables: WeightTables
    consistency: tuple[ContextConsistency, ...]

    @property
    def warnings(self) -> tuple[ContextConsistency, ...]:
        return tuple(c for c in self.consistency if not c.report.acceptable)


def build_weight_tables(questionnaires, method: str = "geometric-mean",
                        aggregation: str = "priorities",
                        cr_threshold: float = DEFAULT_CR_THRESHOLD) -> WeightTableBuild:
    """Derive the two weight tables from a set of expert questionnaires.

    Every expert must cover all 11 contexts. Per context, priorities are
    derived per expert and averaged ("priorities"), or the judgment matrices
    are combined by element-wise geometric mean and derived once
    ("judgments"). Inconsistent matrices (CR over the threshold) are
    reported, not rejected.
    """
    questionnaires = list(questionnaires)
    if not questionnaires:
        raise IncompleteQuestionnaireError("no questionnaires given", [])
    if aggregation not in ("priorities", "judgments"):
        raise ValueError(f"unknown aggregation mode: {aggregation!r}")
    gaps = []
    for q in questionnaires:
        for ctx in q.missing_contexts():
            gaps.append(f"expert {q.expert_id}: missing {ctx.label()}")
    if gaps:
        raise IncompleteQuestionnaireError(
            "incomplete questionnaires: " + "; ".join(gaps), gaps
        )

    consistency_entries = []
    m_table: dict[ComponentKind, dict[QuantityKind, float]] = {}
    n_table: dict[QuantityKind, dict[ComponentKind, float]] = {}

    for ctx in required_contexts():
        per_expert = []
        for q in questionnaires:
            matrix = q.matrices[ctx]
            priorities = derive_priorities(matrix, method=method)
            per_expert.append(priorities)
            consistency_entries.append(
                ContextConsistency(
                    ctx, q.expert_id, consistency(matrix, priorities, cr_threshold)
                )
            )
        if aggregation == "priorities":
            combined = aggregate_experts(per_expert)
        else:
            joint = combine_judgments([q.matrices[ctx] for q in questionnaires])
            combined = derive_priorities(joint, method=method)
        weights = combined.as_dict()
        if ctx.kind == QUANTITIES_WITHIN_COMPONENT:
            m_table[ctx.subject] = {
                parse_quantity(item): w for item, w in weights.items()
            }
        else:
            n_table[ctx.subject] = {
                parse_component(item): w for item, w in weights.items()
            }

    tables = WeightTables(m_table, n_table)
    tables.check_column_sums(1e-6)
    return WeightTableBuild(tables, tuple(consistency_entries))
