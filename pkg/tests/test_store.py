import json
from datetime import datetime, timedelta, timezone

import pytest

from gridobs.errors import ConflictError, LoadError, ReconciliationError
from gridobs.scoring import ObservabilityScore, score_by_area
from gridobs.store import (
    FixtureConfig,
    HistoryStore,
    Inventory,
    area_names,
    format_rfc3339,
    generate_fixture,
    load_inventory,
    load_scores,
    load_snapshot,
    load_weight_tables,
    paper_tables,
    parse_rfc3339,
    persist_scores,
    rank_divergence_fixture,
    save_inventory,
    save_scores,
    save_snapshot,
    save_weight_tables,
)
from gridobs.taxonomy import ComponentKind, QuantityKind, SignalDescriptor, ValidityTag

GOOD_INVENTORY = """signal_id,area,station,component,quantity,in_instruction,weighted_scope
A-S1-1,A,S1,GENERATOR,MW,1,1
A-S1-2,A,S1,TRANSMISSION_LINE,KV,0,1
B-S2-1,B,S2,BUSBAR,KV,0,0
B-S2-2,B,S2,REACTOR_CAPACITOR,MVAR,0,1
"""


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_load_inventory_ok(tmp_path):
    inv = load_inventory(write(tmp_path, "inv.csv", GOOD_INVENTORY))
    assert len(inv.signals) == 4
    assert inv.signals[0].component is ComponentKind.GENERATOR
    assert inv.signals[2].weighted_scope is False
    assert inv.areas() == ["A", "B"]


def test_inventory_round_trip(tmp_path):
    inv = load_inventory(write(tmp_path, "inv.csv", GOOD_INVENTORY))
    save_inventory(inv, tmp_path / "copy.csv")
    again = load_inventory(tmp_path / "copy.csv")
    assert again.signals == inv.signals


def test_load_inventory_rejects_bad_pair(tmp_path):
    bad = GOOD_INVENTORY + "X-1,X,S1,BUSBAR,TAP,0,1\n"
    with pytest.raises(LoadError) as exc:
        load_inventory(write(tmp_path, "inv.csv", bad))
    assert "BUSBAR" in str(exc.value)
    assert exc.value.line == 6


def test_load_inventory_rejects_duplicate_id(tmp_path):
    bad = GOOD_INVENTORY + "A-S1-1,A,S1,GENERATOR,MW,0,1\n"
    with pytest.raises(LoadError, match="duplicate"):
        load_inventory(write(tmp_path, "inv.csv", bad))


def test_load_inventory_rejects_bad_boolean(tmp_path):
    bad = GOOD_INVENTORY.replace("A-S1-1,A,S1,GENERATOR,MW,1,1",
                                 "A-S1-1,A,S1,GENERATOR,MW,yes,1")
    with pytest.raises(LoadError, match="0 or 1"):
        load_inventory(write(tmp_path, "inv.csv", bad))


def test_load_inventory_rejects_wrong_header(tmp_path):
    with pytest.raises(LoadError, match="columns"):
        load_inventory(write(tmp_path, "inv.csv", "id,area\n1,A\n"))


def test_load_inventory_mv_alias(tmp_path):
    text = GOOD_INVENTORY.replace("REACTOR_CAPACITOR,MVAR", "REACTOR_CAPACITOR,MV")
    inv = load_inventory(write(tmp_path, "inv.csv", text))
    assert inv.signals[3].quantity is QuantityKind.MVAR


SNAPSHOT = """signal_id,tag,se_flagged,timestamp
A-S1-1,V,0,2024-01-01T00:00:00Z
A-S1-2,I,0,2024-01-01T00:00:00Z
B-S2-1,V,1,2024-01-01T00:05:00Z
B-S2-2,M,0,2024-01-01T00:00:00Z
"""


def test_load_snapshot_complete(tmp_path):
    inv = load_inventory(write(tmp_path, "inv.csv", GOOD_INVENTORY))
    snap = load_snapshot(write(tmp_path, "snap.csv", SNAPSHOT), inv)
    assert snap.snapshot_id == "snap"
    assert len(snap.records) == 4
    assert snap.taken_at == datetime(2024, 1, 1, 0, 5, tzinfo=timezone.utc)


def test_load_snapshot_fills_missing_as_faulty(tmp_path):
    inv = load_inventory(write(tmp_path, "inv.csv", GOOD_INVENTORY))
    partial = "\n".join(SNAPSHOT.splitlines()[:-1]) + "\n"
    snap = load_snapshot(write(tmp_path, "snap.csv", partial), inv)
    filled = {r.signal_id: r for r in snap.records}["B-S2-2"]
    assert filled.tag is ValidityTag.FAULTY


def test_load_snapshot_missing_can_be_fatal(tmp_path):
    inv = load_inventory(write(tmp_path, "inv.csv", GOOD_INVENTORY))
    partial = "\n".join(SNAPSHOT.splitlines()[:-1]) + "\n"
    with pytest.raises(ReconciliationError, match="B-S2-2"):
        load_snapshot(write(tmp_path, "snap.csv", partial), inv, on_missing="error")


def test_load_snapshot_rejects_orphans(tmp_path):
    inv = load_inventory(write(tmp_path, "inv.csv", GOOD_INVENTORY))
    extra = SNAPSHOT + "GHOST,V,0,2024-01-01T00:00:00Z\n"
    with pytest.raises(ReconciliationError, match="GHOST"):
        load_snapshot(write(tmp_path, "snap.csv", extra), inv)


def test_load_snapshot_rejects_bad_tag(tmp_path):
    inv = load_inventory(write(tmp_path, "inv.csv", GOOD_INVENTORY))
    bad = SNAPSHOT.replace("A-S1-2,I,", "A-S1-2,Q,")
    with pytest.raises(LoadError) as exc:
        load_snapshot(write(tmp_path, "snap.csv", bad), inv)
    assert "'Q'" in str(exc.value)
    assert exc.value.line == 3


def test_snapshot_round_trip(tmp_path):
    inv = load_inventory(write(tmp_path, "inv.csv", GOOD_INVENTORY))
    snap = load_snapshot(write(tmp_path, "snap.csv", SNAPSHOT), inv)
    save_snapshot(snap, tmp_path / "copy.csv")
    again = load_snapshot(tmp_path / "copy.csv", inv)
    assert again.records == snap.records


def test_rfc3339_forms():
    utc = parse_rfc3339("2024-03-01T12:00:00Z")
    offset = parse_rfc3339("2024-03-01T13:00:00+01:00")
    assert utc == offset
    assert format_rfc3339(utc) == "2024-03-01T12:00:00Z"
    with pytest.raises(LoadError):
        parse_rfc3339("2024-03-01T12:00:00")
    with pytest.raises(LoadError):
        parse_rfc3339("yesterday")


def test_weight_tables_round_trip(tmp_path):
    tables = paper_tables()
    save_weight_tables(tables, tmp_path / "t.json")
    again = load_weight_tables(tmp_path / "t.json")
    assert again.to_json() == tables.to_json()


def test_duplicate_signal_rejected_in_memory():
    d = SignalDescriptor("x", "A", "S1", ComponentKind.GENERATOR, QuantityKind.MW)
    with pytest.raises(LoadError, match="duplicate"):
        Inventory((d, d))


# --- score documents and history ---------------------------------------------


def sample_scores():
    return [
        ObservabilityScore("A", 100, 2, 98.0, 1234.5678901234, 12.345678901,
                           99.0000123456789),
        ObservabilityScore("B", 50, 5, 90.0, 100.0, 10.0, 90.0),
    ]


def test_score_document_round_trip(tmp_path):
    taken = datetime(2024, 1, 1, tzinfo=timezone.utc)
    save_scores(tmp_path / "s.json", "snap-1", taken, sample_scores())
    sid, ts, scores = load_scores(tmp_path / "s.json")
    assert sid == "snap-1" and ts == taken
    assert scores == sample_scores()  # bit-identical floats via JSON repr


def test_history_append_and_read_back(tmp_path):
    store = HistoryStore(tmp_path / "hist")
    taken = datetime(2024, 1, 1, tzinfo=timezone.utc)
    store.append("first", taken, sample_scores())
    sid, ts, scores = store.get("first")
    assert scores == sample_scores()
    assert store.snapshot_ids() == ["first"]


def test_history_rejects_duplicate_id(tmp_path):
    store = HistoryStore(tmp_path / "hist")
    taken = datetime(2024, 1, 1, tzinfo=timezone.utc)
    persist_scores(store, "x", sample_scores(), taken)
    with pytest.raises(ConflictError):
        persist_scores(store, "x", sample_scores(), taken)


def test_history_orders_by_taken_at(tmp_path):
    store = HistoryStore(tmp_path / "hist")
    base = datetime(2024, 1, 1, tzinfo=timezone.utc)
    store.append("later", base + timedelta(days=90), sample_scores())
    store.append("earlier", base, sample_scores())
    assert store.snapshot_ids() == ["earlier", "later"]
    assert store.latest()[0] == "later"


def test_history_reads_are_repeatable(tmp_path):
    store = HistoryStore(tmp_path / "hist")
    store.append("a", datetime(2024, 1, 1, tzinfo=timezone.utc), sample_scores())
    assert store.get("a") == store.get("a")


def test_history_unknown_id(tmp_path):
    store = HistoryStore(tmp_path / "hist")
    with pytest.raises(LoadError, match="nope"):
        store.get("nope")


# --- fixture generation -------------------------------------------------------


def test_area_names_extend_past_z():
    names = area_names(28)
    assert names[0] == "A" and names[25] == "Z"
    assert names[26] == "AA" and names[27] == "AB"


def test_generator_is_deterministic():
    cfg = FixtureConfig(seed=42, areas=3, stations_per_area=2,
                        signals_per_station=10, fault_rate=0.2,
                        instruction_rate=0.3)
    inv1, snap1 = generate_fixture(cfg)
    inv2, snap2 = generate_fixture(cfg)
    assert inv1.signals == inv2.signals
    assert snap1.records == snap2.records


def test_generator_dimensions_and_reconciliation():
    cfg = FixtureConfig(seed=1, areas=4, stations_per_area=3,
                        signals_per_station=5, fault_rate=0.5,
                        instruction_rate=0.0, out_of_scope_rate=0.2)
    inv, snap = generate_fixture(cfg)
    assert len(inv.signals) == 4 * 3 * 5
    assert {r.signal_id for r in snap.records} == inv.ids()
    assert len(inv.areas()) == 4
    assert any(not d.weighted_scope for d in inv.signals)


def test_fixture_config_from_json_rejects_unknown_keys():
    with pytest.raises(LoadError, match="unknown"):
        FixtureConfig.from_json({"seed": 1, "areas": 2, "stations_per_area": 1,
                                 "signals_per_station": 1, "fault_rate": 0,
                                 "instruction_rate": 0, "bogus": True})


def test_fixture_config_validation():
    with pytest.raises(ValueError):
        FixtureConfig(seed=1, areas=0, stations_per_area=1, signals_per_station=1,
                      fault_rate=0.1, instruction_rate=0.1)
    with pytest.raises(ValueError):
        FixtureConfig(seed=1, areas=1, stations_per_area=1, signals_per_station=1,
                      fault_rate=1.5, instruction_rate=0.1)


def test_rank_divergence_fixture_shape():
    inv, snap = rank_divergence_fixture()
    scores = {s.scope: s for s in score_by_area(inv.signals, snap.records, paper_tables())}
    assert scores["C"].unweighted == scores["D"].unweighted == 97.0
    assert scores["C"].weighted > scores["D"].weighted
