"""File formats, reconciliation, history persistence, and synthetic fixtures.

Inventories and snapshots are flat CSV; weight tables and questionnaires
are JSON; score history is a directory of JSON documents plus an index.
A seeded generator produces reproducible synthetic fixtures so area-level
experiments do not depend on any real grid data.
"""
from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, replace
from datetime import datetime, timedelta, timezone
from importlib import resources
from pathlib import Path

import numpy as np

from .ahp import Questionnaire, WeightTables
from .errors import ConflictError, LoadError, ReconciliationError
from .scoring import ObservabilityScore, SnapshotRecord, utc_now
from .taxonomy import (
    SignalDescriptor,
    ValidityTag,
    VALID_PAIRS,
    parse_component,
    parse_quantity,
    parse_tag,
)

INVENTORY_COLUMNS = ["signal_id", "area", "station", "component", "quantity",
                     "in_instruction", "weighted_scope"]
SNAPSHOT_COLUMNS = ["signal_id", "tag", "se_flagged", "timestamp"]


def parse_rfc3339(text: str) -> datetime:
    t = text.strip()
    if t.endswith(("Z", "z")):
        t = t[:-1] + "+00:00"
    try:
        dt = datetime.fromisoformat(t)
    except ValueError:
        raise LoadError(f"bad RFC 3339 timestamp: {text!r}") from None
    if dt.tzinfo is None:
        raise LoadError(f"timestamp {text!r} lacks a UTC offset")
    return dt.astimezone(timezone.utc)


def format_rfc3339(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


def _parse_bool01(value: str, column: str) -> bool:
    if value == "0":
        return False
    if value == "1":
        return True
    raise LoadError(f"column {column} must be 0 or 1, got {value!r}")


@dataclass(frozen=True)
class Inventory:
    signals: tuple[SignalDescriptor, ...]
    source_path: str = "<memory>"
    loaded_at: datetime | None = None

    def __post_init__(self):
        seen = set()
        for d in self.signals:
            if d.signal_id in seen:
                raise LoadError(f"duplicate signal_id {d.signal_id!r}")
            seen.add(d.signal_id)

    def ids(self) -> set[str]:
        return {d.signal_id for d in self.signals}

    def areas(self) -> list[str]:
        return sorted({d.area for d in self.signals})


@dataclass(frozen=True)
class SnapshotSet:
    snapshot_id: str
    records: tuple[SnapshotRecord, ...]
    taken_at: datetime

    def __post_init__(self):
        seen = set()
        for r in self.records:
            if r.signal_id in seen:
                raise ReconciliationError(
                    f"snapshot {self.snapshot_id!r}: duplicate record for {r.signal_id!r}"
                )
            seen.add(r.signal_id)


def load_inventory(path) -> Inventory:
    """Load and validate an inventory CSV (header required, booleans 0/1)."""
    path = Path(path)
    signals = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise LoadError("empty file", path=str(path))
        if set(reader.fieldnames) != set(INVENTORY_COLUMNS):
            raise LoadError(
                f"expected columns {INVENTORY_COLUMNS}, got {reader.fieldnames}",
                path=str(path), line=1,
            )
        for row in reader:
            lineno = reader.line_num
            try:
                if any(v is None for v in row.values()):
                    raise LoadError("short row")
                signals.append(SignalDescriptor(
                    signal_id=row["signal_id"].strip(),
                    area=row["area"].strip(),
                    station=row["station"].strip(),
                    component=parse_component(row["component"]),
                    quantity=parse_quantity(row["quantity"]),
                    in_instruction=_parse_bool01(row["in_instruction"].strip(), "in_instruction"),
                    weighted_scope=_parse_bool01(row["weighted_scope"].strip(), "weighted_scope"),
                ))
            except LoadError as e:
                raise LoadError(str(e), path=str(path), line=lineno) from None
            except Exception as e:
                raise LoadError(str(e), path=str(path), line=lineno) from None
    try:
        return Inventory(tuple(signals), source_path=str(path), loaded_at=utc_now())
    except LoadError as e:
        raise LoadError(str(e), path=str(path)) from None


def save_inventory(inventory: Inventory, path) -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(INVENTORY_COLUMNS)
        for d in inventory.signals:
            writer.writerow([
                d.signal_id, d.area, d.station, d.component.name, d.quantity.name,
                int(d.in_instruction), int(d.weighted_scope),
            ])


def load_snapshot(path, inventory: Inventory, snapshot_id: str | None = None,
                  on_missing: str = "faulty") -> SnapshotSet:
    """Load a snapshot CSV and reconcile it against the inventory.

    Unknown signal ids are rejected. Inventory signals without a record are
    filled in as FAULTY (no information), or rejected with
    on_missing="error".
    """
    path = Path(path)
    records = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise LoadError("empty file", path=str(path))
        if set(reader.fieldnames) != set(SNAPSHOT_COLUMNS):
            raise LoadError(
                f"expected columns {SNAPSHOT_COLUMNS}, got {reader.fieldnames}",
                path=str(path), line=1,
            )
        for row in reader:
            lineno = reader.line_num
            try:
                if any(v is None for v in row.values()):
                    raise LoadError("short row")
                records.append(SnapshotRecord(
                    signal_id=row["signal_id"].strip(),
                    tag=parse_tag(row["tag"]),
                    se_flagged=_parse_bool01(row["se_flagged"].strip(), "se_flagged"),
                    timestamp=parse_rfc3339(row["timestamp"]),
                ))
            except LoadError as e:
                raise LoadError(str(e), path=str(path), line=lineno) from None
            except Exception as e:
                raise LoadError(str(e), path=str(path), line=lineno) from None

    known = inventory.ids()
    orphans = sorted({r.signal_id for r in records} - known)
    if orphans:
        raise ReconciliationError(
            f"snapshot {path.name}: records for unknown signals: "
            + ", ".join(orphans[:10]) + (" ..." if len(orphans) > 10 else "")
        )
    taken_at = max((r.timestamp for r in records if r.timestamp), default=None) or utc_now()
    present = {r.signal_id for r in records}
    missing = [d.signal_id for d in inventory.signals if d.signal_id not in present]
    if missing and on_missing == "error":
        raise ReconciliationError(
            f"snapshot {path.name}: no record for {len(missing)} signals "
            f"({', '.join(missing[:10])}{' ...' if len(missing) > 10 else ''})"
        )
    for sid in missing:
        records.append(SnapshotRecord(sid, ValidityTag.FAULTY, False, taken_at))
    sid = snapshot_id if snapshot_id is not None else path.stem
    return SnapshotSet(sid, tuple(records), taken_at)


def save_snapshot(snapshot: SnapshotSet, path) -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(SNAPSHOT_COLUMNS)
        for r in snapshot.records:
            writer.writerow([
                r.signal_id, r.tag.value, int(r.se_flagged),
                format_rfc3339(r.timestamp if r.timestamp else snapshot.taken_at),
            ])


# --- weight tables and questionnaires on disk ------------------------------


def load_weight_tables(path) -> WeightTables:
    with Path(path).open(encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as e:
            raise LoadError(f"bad JSON: {e}", path=str(path)) from None
    return WeightTables.from_json(obj)


def save_weight_tables(tables: WeightTables, path) -> None:
    Path(path).write_text(
        json.dumps(tables.to_json(), indent=2) + "\n", encoding="utf-8"
    )


def load_questionnaire(path) -> Questionnaire:
    with Path(path).open(encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as e:
            raise LoadError(f"bad JSON: {e}", path=str(path)) from None
    return Questionnaire.from_json(obj)


def _data_root():
    return resources.files("gridobs") / "data"


def paper_tables() -> WeightTables:
    """The bundled transcription of the published averaged rating tables."""
    with (_data_root() / "tables_paper.json").open(encoding="utf-8") as fh:
        return WeightTables.from_json(json.load(fh))


def reference_questionnaires() -> list[Questionnaire]:
    """Bundled expert questionnaires that reproduce the published tables."""
    root = _data_root() / "questionnaires"
    out = []
    for entry in sorted(root.iterdir(), key=lambda p: p.name):
        if entry.name.endswith(".json"):
            with entry.open(encoding="utf-8") as fh:
                out.append(Questionnaire.from_json(json.load(fh)))
    return out


# --- score history ----------------------------------------------------------


def _score_doc(snapshot_id: str, taken_at: datetime, scores) -> dict:
    return {
        "snapshot_id": snapshot_id,
        "taken_at": format_rfc3339(taken_at),
        "scores": [s.to_json() for s in scores],
    }


def save_scores(path, snapshot_id: str, taken_at: datetime, scores) -> None:
    Path(path).write_text(
        json.dumps(_score_doc(snapshot_id, taken_at, scores), indent=2) + "\n",
        encoding="utf-8",
    )


def load_scores(path):
    """Read a score document: (snapshot_id, taken_at, [ObservabilityScore])."""
    with Path(path).open(encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as e:
            raise LoadError(f"bad JSON: {e}", path=str(path)) from None
    try:
        return (
            obj["snapshot_id"],
            parse_rfc3339(obj["taken_at"]),
            [ObservabilityScore.from_json(s) for s in obj["scores"]],
        )
    except KeyError as e:
        raise LoadError(f"score document missing key {e}", path=str(path)) from None


class HistoryStore:
    """Append-only directory of per-snapshot score documents.

    Single writer, many readers. An index file keeps entries ordered by
    taken_at regardless of append order.
    """

    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._index_path = self.root / "index.json"
        if not self._index_path.exists():
            self._write_index([])

    def _read_index(self) -> list[dict]:
        with self._index_path.open(encoding="utf-8") as fh:
            return json.load(fh)["entries"]

    def _write_index(self, entries: list[dict]) -> None:
        entries = sorted(entries, key=lambda e: (e["taken_at"], e["snapshot_id"]))
        self._index_path.write_text(
            json.dumps({"entries": entries}, indent=2) + "\n", encoding="utf-8"
        )

    def snapshot_ids(self) -> list[str]:
        return [e["snapshot_id"] for e in self._read_index()]

    def append(self, snapshot_id: str, taken_at: datetime, scores) -> None:
        entries = self._read_index()
        if any(e["snapshot_id"] == snapshot_id for e in entries):
            raise ConflictError(f"snapshot {snapshot_id!r} already stored")
        fname = re.sub(r"[^A-Za-z0-9._-]", "_", snapshot_id) + ".json"
        if any(e["file"] == fname for e in entries):
            raise ConflictError(f"file name collision for {snapshot_id!r}")
        save_scores(self.root / fname, snapshot_id, taken_at, scores)
        entries.append({
            "snapshot_id": snapshot_id,
            "taken_at": format_rfc3339(taken_at),
            "file": fname,
        })
        self._write_index(entries)

    def get(self, snapshot_id: str):
        for e in self._read_index():
            if e["snapshot_id"] == snapshot_id:
                return load_scores(self.root / e["file"])
        raise LoadError(f"snapshot {snapshot_id!r} not in history", path=str(self.root))

    def entries(self):
        return [self.get(e["snapshot_id"]) for e in self._read_index()]

    def latest(self):
        ids = self.snapshot_ids()
        if not ids:
            return None
        return self.get(ids[-1])


def persist_scores(store: HistoryStore, snapshot_id: str, scores,
                   taken_at: datetime | None = None) -> HistoryStore:
    store.append(snapshot_id, taken_at or utc_now(), scores)
    return store


# --- synthetic fixtures ------------------------------------------------------

FIXTURE_BASE_TIME = datetime(2024, 1, 1, tzinfo=timezone.utc)


@dataclass(frozen=True)
class FixtureConfig:
    """Parameters of the seeded synthetic fixture generator."""

    seed: int
    areas: int
    stations_per_area: int
    signals_per_station: int
    fault_rate: float
    instruction_rate: float
    out_of_scope_rate: float = 0.0
    taken_at: datetime = FIXTURE_BASE_TIME

    def __post_init__(self):
        if self.areas < 1 or self.stations_per_area < 1 or self.signals_per_station < 1:
            raise ValueError("fixture dimensions must be >= 1")
        for name in ("fault_rate", "instruction_rate", "out_of_scope_rate"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"{name} must be in [0, 1], got {v!r}")

    @classmethod
    def from_json(cls, obj: dict) -> "FixtureConfig":
        known = {"seed", "areas", "stations_per_area", "signals_per_station",
                 "fault_rate", "instruction_rate", "out_of_scope_rate", "taken_at"}
        unknown = set(obj) - known
        if unknown:
            raise LoadError(f"unknown fixture config keys: {sorted(unknown)}")
        kwargs = dict(obj)
        if "taken_at" in kwargs:
            kwargs["taken_at"] = parse_rfc3339(kwargs["taken_at"])
        return cls(**kwargs)


def area_names(n: int) -> list[str]:
    """A, B, ..., Z, AA, AB, ... like spreadsheet columns."""
    names = []
    for i in range(n):
        name = ""
        k = i
        while True:
            name = chr(ord("A") + k % 26) + name
            k = k // 26 - 1
            if k < 0:
                break
        names.append(name)
    return names


#: Bad records split evenly over these shapes: three invalid tags plus the
#: valid-looking-but-flagged case.
_BAD_SHAPES = (
    (ValidityTag.FAULTY, False),
    (ValidityTag.NON_CURRENT, False),
    (ValidityTag.INVALID, False),
    (ValidityTag.VALID, True),
)


def generate_fixture(config: FixtureConfig):
    """Deterministic synthetic inventory plus one full snapshot."""
    rng = np.random.default_rng(config.seed)
    n = config.areas * config.stations_per_area * config.signals_per_station
    pair_idx = rng.integers(0, len(VALID_PAIRS), size=n)
    instruction = rng.random(n) < config.instruction_rate
    out_of_scope = rng.random(n) < config.out_of_scope_rate
    bad = rng.random(n) < config.fault_rate
    bad_shape = rng.integers(0, len(_BAD_SHAPES), size=n)
    manual = rng.random(n) < 0.1

    signals = []
    records = []
    i = 0
    for area in area_names(config.areas):
        for s in range(config.stations_per_area):
            station = f"{area}S{s + 1:02d}"
            for _ in range(config.signals_per_station):
                comp, quant = VALID_PAIRS[pair_idx[i]]
                sid = f"{area}-{station}-{i:06d}"
                signals.append(SignalDescriptor(
                    signal_id=sid, area=area, station=station,
                    component=comp, quantity=quant,
                    in_instruction=bool(instruction[i]),
                    weighted_scope=not bool(out_of_scope[i]),
                ))
                if bad[i]:
                    tag, se = _BAD_SHAPES[bad_shape[i]]
                else:
                    tag, se = (ValidityTag.MANUAL if manual[i] else ValidityTag.VALID), False
                records.append(SnapshotRecord(sid, tag, se, config.taken_at))
                i += 1
    inventory = Inventory(tuple(signals), source_path=f"<fixture:{config.seed}>",
                          loaded_at=utc_now())
    snapshot = SnapshotSet(f"fixture-{config.seed}", tuple(records), config.taken_at)
    return inventory, snapshot


def rank_divergence_fixture(seed: int = 97):
    """Two areas tied on the plain index but apart on the weighted one.

    Both areas carry the same seeded mix of 97 valid signals; each also has
    3 invalid ones, but area C loses three of the least important signals
    (transmission-line kV) while area D loses three of the most important
    (busbar kV). The plain index ties at 97%; the weighted index separates
    them.
    """
    rng = np.random.default_rng(seed)
    pair_idx = rng.integers(0, len(VALID_PAIRS), size=97)
    instruction = rng.random(97) < 0.2
    signals = []
    records = []
    forced = {
        "C": (parse_component("TRANSMISSION_LINE"), parse_quantity("KV")),
        "D": (parse_component("BUSBAR"), parse_quantity("KV")),
    }
    for area in ("C", "D"):
        station = f"{area}S01"
        for k in range(97):
            comp, quant = VALID_PAIRS[pair_idx[k]]
            sid = f"{area}-{station}-{k:04d}"
            signals.append(SignalDescriptor(sid, area, station, comp, quant,
                                            in_instruction=bool(instruction[k])))
            records.append(SnapshotRecord(sid, ValidityTag.VALID, False, FIXTURE_BASE_TIME))
        comp, quant = forced[area]
        for k in range(3):
            sid = f"{area}-{station}-bad{k}"
            signals.append(SignalDescriptor(sid, area, station, comp, quant))
            records.append(SnapshotRecord(sid, ValidityTag.INVALID, False, FIXTURE_BASE_TIME))
    inventory = Inventory(tuple(signals), source_path=f"<rank-divergence:{seed}>",
                          loaded_at=utc_now())
    snapshot = SnapshotSet(f"rank-divergence-{seed}", tuple(records), FIXTURE_BASE_TIME)
    return inventory, snapshot


def shifted_snapshot(snapshot: SnapshotSet, months: int = 3) -> datetime:
    return snapshot.taken_at + timedelta(days=30 * months)
