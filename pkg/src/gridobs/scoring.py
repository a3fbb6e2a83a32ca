"""Observability indices over snapshots of tagged signals.

The plain index is the share of signals whose data are correct; the
weighted index applies each signal's table weight, doubles signals named
in operating instructions, and ignores signals outside the weighted scope.
Scores are computed per station or per area and can be compared across
snapshots taken months apart.
"""
from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from . import kernels
from .ahp import WeightTables
from .errors import (
    ComparisonMismatchError,
    ReconciliationError,
    UndefinedScoreError,
)
from .taxonomy import SignalDescriptor, ValidityTag, parse_tag

#: Deltas smaller than this (percentage points) count as unchanged, matching
#: integer-rounded report tables.
UNCHANGED_BAND = 0.5


@dataclass(frozen=True)
class SnapshotRecord:
    """One signal's validity at a point in time.

    se_flagged marks a nominally valid value that state estimation found
    inconsistent with its estimate; it is only meaningful on VALID records.
    """

    signal_id: str
    tag: ValidityTag
    se_flagged: bool = False
    timestamp: datetime | None = None

    def __post_init__(self):
        if self.se_flagged and self.tag is not ValidityTag.VALID:
            raise ReconciliationError(
                f"record {self.signal_id!r}: se_flagged requires tag V, got {self.tag.value}"
            )
        if self.timestamp is not None and self.timestamp.tzinfo is None:
            raise ReconciliationError(
                f"record {self.signal_id!r}: timestamp must be timezone-aware"
            )


@dataclass(frozen=True)
class InvalidityPolicy:
    """Which records count as incorrect data.

    Defaults: faulty, non-current, and invalidated records are incorrect;
    manually entered values are trusted; valid-looking records flagged by
    state estimation are incorrect. Missing records are filled as FAULTY
    unless on_missing="error".
    """

    invalid_tags: frozenset[ValidityTag] = frozenset(
        {ValidityTag.FAULTY, ValidityTag.NON_CURRENT, ValidityTag.INVALID}
    )
    count_se_flagged: bool = True
    on_missing: str = "faulty"

    def __post_init__(self):
        if self.on_missing not in ("faulty", "error"):
            raise ValueError(f"on_missing must be 'faulty' or 'error', got {self.on_missing!r}")

    @classmethod
    def from_json(cls, obj: dict) -> "InvalidityPolicy":
        kwargs = {}
        if "invalid_tags" in obj:
            kwargs["invalid_tags"] = frozenset(parse_tag(t) for t in obj["invalid_tags"])
        if "count_se_flagged" in obj:
            kwargs["count_se_flagged"] = bool(obj["count_se_flagged"])
        if "on_missing" in obj:
            kwargs["on_missing"] = obj["on_missing"]
        unknown = set(obj) - {"invalid_tags", "count_se_flagged", "on_missing"}
        if unknown:
            raise ValueError(f"unknown policy keys: {sorted(unknown)}")
        return cls(**kwargs)

    def to_json(self) -> dict:
        return {
            "invalid_tags": sorted(t.value for t in self.invalid_tags),
            "count_se_flagged": self.count_se_flagged,
            "on_missing": self.on_missing,
        }


DEFAULT_POLICY = InvalidityPolicy()


def is_invalid(record: SnapshotRecord, policy: InvalidityPolicy = DEFAULT_POLICY) -> bool:
    """True iff the record counts as incorrect data under the policy."""
    if record.tag in policy.invalid_tags:
        return True
    return (
        record.tag is ValidityTag.VALID
        and record.se_flagged
        and policy.count_se_flagged
    )


@dataclass(frozen=True)
class ObservabilityScore:
    """Both indices for one scope (a station or an area)."""

    scope: str
    total_raw: int
    invalid_raw: int
    unweighted: float
    total_weighted: float
    invalid_weighted: float
    weighted: float

    def to_json(self) -> dict:
        return {
            "scope": self.scope,
            "total_raw": self.total_raw,
            "invalid_raw": self.invalid_raw,
            "unweighted": self.unweighted,
            "total_weighted": self.total_weighted,
            "invalid_weighted": self.invalid_weighted,
            "weighted": self.weighted,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ObservabilityScore":
        return cls(
            scope=obj["scope"],
            total_raw=int(obj["total_raw"]),
            invalid_raw=int(obj["invalid_raw"]),
            unweighted=float(obj["unweighted"]),
            total_weighted=float(obj["total_weighted"]),
            invalid_weighted=float(obj["invalid_weighted"]),
            weighted=float(obj["weighted"]),
        )


def _percentage(good, total) -> float:
    # Ratio first: good/total <= 1 exactly, so the result can never round
    # past 100. Endpoints returned directly so 0 and 100 are always exact.
    if good == total:
        return 100.0
    if good == 0:
        return 0.0
    return 100.0 * (good / total)


def unweighted_observability(total: int, invalid: int) -> float:
    """Percentage of correct signals: 100 * (total - invalid) / total."""
    if total < 1:
        raise UndefinedScoreError("no signals in scope")
    if not (0 <= invalid <= total):
        raise UndefinedScoreError(
            f"invalid count {invalid} outside 0..{total}"
        )
    return _percentage(total - invalid, total)


def _invalid_flags(inventory, records, policy):
    """Reconcile records against the inventory, one flag per signal.

    Unknown record ids are rejected; signals without a record are treated
    per the policy (filled as FAULTY or a hard error).
    """
    by_id = {}
    for r in records:
        if r.signal_id in by_id:
            raise ReconciliationError(f"duplicate record for signal {r.signal_id!r}")
        by_id[r.signal_id] = r
    known = {d.signal_id for d in inventory}
    orphans = sorted(set(by_id) - known)
    if orphans:
        raise ReconciliationError(
            f"records for unknown signals: {', '.join(orphans[:10])}"
            + (" ..." if len(orphans) > 10 else "")
        )
    missing_invalid = ValidityTag.FAULTY in policy.invalid_tags
    flags = np.zeros(len(inventory), dtype=np.uint8)
    for i, d in enumerate(inventory):
        r = by_id.get(d.signal_id)
        if r is None:
            if policy.on_missing == "error":
                raise ReconciliationError(f"no record for signal {d.signal_id!r}")
            flags[i] = missing_invalid
        else:
            flags[i] = is_invalid(r, policy)
    return flags


def _pair_weights(tables: WeightTables):
    cache = {}
    for c, cells in tables.m_table.items():
        for q, m in cells.items():
            cache[(c, q)] = m * tables.n_table[q][c]
    return cache


def _score_groups(inventory, records, tables, policy, group_key):
    inventory = list(inventory)
    if not inventory:
        raise UndefinedScoreError("empty inventory")
    invalid = _invalid_flags(inventory, records, policy)

    groups = sorted({group_key(d) for d in inventory})
    index = {g: i for i, g in enumerate(groups)}
    n = len(inventory)
    group_idx = np.empty(n, dtype=np.intc)
    weight = np.empty(n, dtype=np.float64)
    mult = np.empty(n, dtype=np.float64)
    scope = np.empty(n, dtype=np.uint8)
    pair_w = _pair_weights(tables)
    for i, d in enumerate(inventory):
        group_idx[i] = index[group_key(d)]
        weight[i] = pair_w[(d.component, d.quantity)]
        mult[i] = 2.0 if d.in_instruction else 1.0
        scope[i] = d.weighted_scope

    tr, ir, tw, iw = kernels.accumulate_group_totals(
        group_idx, weight, mult, scope, invalid, len(groups)
    )

    scores = []
    for g, name in enumerate(groups):
        if tw[g] <= 0.0:
            raise UndefinedScoreError(
                f"scope {name!r}: no weighted signals in scope"
            )
        scores.append(
            ObservabilityScore(
                scope=name,
                total_raw=int(tr[g]),
                invalid_raw=int(ir[g]),
                unweighted=_percentage(int(tr[g]) - int(ir[g]), int(tr[g])),
                total_weighted=float(tw[g]),
                invalid_weighted=float(iw[g]),
                weighted=_percentage(float(tw[g]) - float(iw[g]), float(tw[g])),
            )
        )
    scores.sort(key=lambda s: (-s.weighted, s.scope))
    return scores


def weighted_observability(inventory, records, tables: WeightTables,
                           policy: InvalidityPolicy = DEFAULT_POLICY,
                           scope: str = "all") -> ObservabilityScore:
    """Score one whole scope. Raw counts cover every signal; the weighted
    sums only signals with weighted_scope set."""
    scores = _score_groups(inventory, records, tables, policy, lambda d: scope)
    return scores[0]


def score_by_area(inventory, records, tables: WeightTables,
                  policy: InvalidityPolicy = DEFAULT_POLICY) -> list[ObservabilityScore]:
    """One score per area, ordered by descending weighted score then area id."""
    return _score_groups(inventory, records, tables, policy, lambda d: d.area)


def score_by_station(inventory, records, tables: WeightTables,
                     policy: InvalidityPolicy = DEFAULT_POLICY) -> list[ObservabilityScore]:
    """One score per station; scopes are 'area/station' to keep them unique."""
    return _score_groups(
        inventory, records, tables, policy, lambda d: f"{d.area}/{d.station}"
    )


def _classify(delta: float) -> str:
    if abs(delta) < UNCHANGED_BAND:
        return "unchanged"
    return "improved" if delta > 0 else "declined"


@dataclass(frozen=True)
class AreaDelta:
    area: str
    unweighted_before: float
    unweighted_after: float
    unweighted_delta: float
    unweighted_change: str
    weighted_before: float
    weighted_after: float
    weighted_delta: float
    weighted_change: str

    def to_json(self) -> dict:
        return {
            "area": self.area,
            "unweighted": {
                "before": self.unweighted_before,
                "after": self.unweighted_after,
                "delta": self.unweighted_delta,
                "change": self.unweighted_change,
            },
            "weighted": {
                "before": self.weighted_before,
                "after": self.weighted_after,
                "delta": self.weighted_delta,
                "change": self.weighted_change,
            },
        }


@dataclass(frozen=True)
class ComparisonReport:
    deltas: tuple[AreaDelta, ...]

    def counts(self) -> dict[str, dict[str, int]]:
        out = {"unweighted": {"improved": 0, "unchanged": 0, "declined": 0},
               "weighted": {"improved": 0, "unchanged": 0, "declined": 0}}
        for d in self.deltas:
            out["unweighted"][d.unweighted_change] += 1
            out["weighted"][d.weighted_change] += 1
        return out


def compare_snapshots(before, after) -> ComparisonReport:
    """Per-area deltas between two score lists over the same area set."""
    b = {s.scope: s for s in before}
    a = {s.scope: s for s in after}
    if set(b) != set(a):
        only_b = set(b) - set(a)
        only_a = set(a) - set(b)
        raise ComparisonMismatchError(
            "area sets differ: "
            f"only in before={sorted(only_b)}, only in after={sorted(only_a)}",
            missing_after=only_b,
            missing_before=only_a,
        )
    deltas = []
    for area in sorted(b):
        du = a[area].unweighted - b[area].unweighted
        dw = a[area].weighted - b[area].weighted
        deltas.append(
            AreaDelta(
                area=area,
                unweighted_before=b[area].unweighted,
                unweighted_after=a[area].unweighted,
                unweighted_delta=du,
                unweighted_change=_classify(du),
                weighted_before=b[area].weighted,
                weighted_after=a[area].weighted,
                weighted_delta=dw,
                weighted_change=_classify(dw),
            )
        )
    return ComparisonReport(tuple(deltas))


def utc_now() -> datetime:
    return datetime.now(timezone.utc).replace(microsecond=0)
