import math

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from gridobs.ahp import WeightTables, signal_weight
from gridobs.errors import (
    ComparisonMismatchError,
    ReconciliationError,
    UndefinedScoreError,
)
from gridobs.scoring import (
    DEFAULT_POLICY,
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
from gridobs.store import paper_tables
from gridobs.taxonomy import (
    VALID_PAIRS,
    ComponentKind,
    QuantityKind,
    SignalDescriptor,
    ValidityTag,
)

# Frozen oracle values for the two-signal worked example: direct summation of
# the table products 51.5*54.57 (generator MW) and 6.27*14.53 (line kV).
TWO_SIGNAL_PLAIN = 96.8600925169314
TWO_SIGNAL_WITH_INSTRUCTION = 93.9113626147395


def sd(i, area="A", station=None, pair=(ComponentKind.GENERATOR, QuantityKind.MW),
       instr=False, scope=True):
    return SignalDescriptor(
        signal_id=f"s{i}", area=area, station=station or f"{area}S1",
        component=pair[0], quantity=pair[1],
        in_instruction=instr, weighted_scope=scope,
    )


def rec(i, tag=ValidityTag.VALID, se=False):
    return SnapshotRecord(f"s{i}", tag, se)


# --- record and policy -------------------------------------------------------


def test_se_flag_only_on_valid():
    with pytest.raises(ReconciliationError):
        SnapshotRecord("x", ValidityTag.FAULTY, se_flagged=True)
    SnapshotRecord("x", ValidityTag.VALID, se_flagged=True)


def test_default_policy_memberships():
    assert is_invalid(SnapshotRecord("x", ValidityTag.FAULTY))
    assert is_invalid(SnapshotRecord("x", ValidityTag.NON_CURRENT))
    assert is_invalid(SnapshotRecord("x", ValidityTag.INVALID))
    assert not is_invalid(SnapshotRecord("x", ValidityTag.VALID))
    assert not is_invalid(SnapshotRecord("x", ValidityTag.MANUAL))
    assert is_invalid(SnapshotRecord("x", ValidityTag.VALID, se_flagged=True))


def test_policy_is_configurable():
    trusting = InvalidityPolicy(
        invalid_tags=frozenset({ValidityTag.FAULTY}), count_se_flagged=False
    )
    assert not is_invalid(SnapshotRecord("x", ValidityTag.INVALID), trusting)
    assert not is_invalid(SnapshotRecord("x", ValidityTag.VALID, se_flagged=True), trusting)
    strict_manual = InvalidityPolicy(
        invalid_tags=frozenset({ValidityTag.MANUAL}), count_se_flagged=False
    )
    assert is_invalid(SnapshotRecord("x", ValidityTag.MANUAL), strict_manual)


def test_policy_json_round_trip():
    p = InvalidityPolicy.from_json(
        {"invalid_tags": ["F", "NON_CURRENT", "I"], "count_se_flagged": False}
    )
    assert p.invalid_tags == frozenset(
        {ValidityTag.FAULTY, ValidityTag.NON_CURRENT, ValidityTag.INVALID}
    )
    assert not p.count_se_flagged
    assert InvalidityPolicy.from_json(p.to_json()) == p


def test_policy_rejects_unknown_keys():
    with pytest.raises(ValueError, match="unknown"):
        InvalidityPolicy.from_json({"invalid": ["F"]})


# --- plain index -------------------------------------------------------------


def test_unweighted_98():
    assert unweighted_observability(100, 2) == 98.0


@pytest.mark.parametrize("n", [1, 7, 100, 12345])
def test_unweighted_bounds(n):
    assert unweighted_observability(n, 0) == 100.0
    assert unweighted_observability(n, n) == 0.0


def test_unweighted_empty_scope():
    with pytest.raises(UndefinedScoreError):
        unweighted_observability(0, 0)
    with pytest.raises(UndefinedScoreError):
        unweighted_observability(10, 11)


# --- weighted index ----------------------------------------------------------


def two_signal_inventory(kv_in_instruction=False):
    inv = [
        sd(0, pair=(ComponentKind.GENERATOR, QuantityKind.MW)),
        sd(1, pair=(ComponentKind.TRANSMISSION_LINE, QuantityKind.KV),
           instr=kv_in_instruction),
    ]
    records = [rec(0, ValidityTag.VALID), rec(1, ValidityTag.INVALID)]
    return inv, records


def test_two_signal_example():
    inv, records = two_signal_inventory()
    s = weighted_observability(inv, records, paper_tables())
    assert s.total_raw == 2 and s.invalid_raw == 1
    assert s.unweighted == 50.0
    assert s.total_weighted == 2810.355 + 91.10309999999998
    assert s.weighted == TWO_SIGNAL_PLAIN
    assert round(s.weighted, 2) == 96.86


def test_two_signal_example_with_instruction():
    inv, records = two_signal_inventory(kv_in_instruction=True)
    s = weighted_observability(inv, records, paper_tables())
    assert s.weighted == TWO_SIGNAL_WITH_INSTRUCTION
    assert round(s.weighted, 2) == 93.91


def test_all_valid_scores_100():
    inv = [sd(i, pair=VALID_PAIRS[i % 20]) for i in range(40)]
    records = [rec(i) for i in range(40)]
    s = weighted_observability(inv, records, paper_tables())
    assert s.weighted == 100.0
    assert s.unweighted == 100.0


def test_all_invalid_scores_0():
    inv = [sd(i, pair=VALID_PAIRS[i % 20]) for i in range(40)]
    records = [rec(i, ValidityTag.INVALID) for i in range(40)]
    s = weighted_observability(inv, records, paper_tables())
    assert s.weighted == 0.0
    assert s.unweighted == 0.0


def test_out_of_scope_counts_only_in_plain_index():
    inv = [
        sd(0, scope=True),
        sd(1, pair=(ComponentKind.BUSBAR, QuantityKind.KV), scope=False),
    ]
    records = [rec(0, ValidityTag.VALID), rec(1, ValidityTag.INVALID)]
    s = weighted_observability(inv, records, paper_tables())
    assert s.total_raw == 2 and s.invalid_raw == 1
    assert s.unweighted == 50.0
    # the invalid signal is outside the weighted scope, so weighted stays 100
    assert s.weighted == 100.0
    assert s.total_weighted == signal_weight(inv[0], paper_tables())


def test_missing_record_defaults_to_faulty():
    inv = [sd(0), sd(1)]
    records = [rec(0)]
    s = weighted_observability(inv, records, paper_tables())
    assert s.invalid_raw == 1


def test_missing_record_can_be_fatal():
    inv = [sd(0), sd(1)]
    policy = InvalidityPolicy(on_missing="error")
    with pytest.raises(ReconciliationError, match="s1"):
        weighted_observability(inv, [rec(0)], paper_tables(), policy)


def test_unknown_record_rejected():
    inv = [sd(0)]
    with pytest.raises(ReconciliationError, match="ghost"):
        weighted_observability(
            inv, [rec(0), SnapshotRecord("ghost", ValidityTag.VALID)], paper_tables()
        )


def test_duplicate_record_rejected():
    inv = [sd(0)]
    with pytest.raises(ReconciliationError, match="duplicate"):
        weighted_observability(inv, [rec(0), rec(0)], paper_tables())


def test_empty_inventory_rejected():
    with pytest.raises(UndefinedScoreError):
        weighted_observability([], [], paper_tables())


def test_zero_weighted_scope_rejected():
    inv = [sd(0, scope=False)]
    with pytest.raises(UndefinedScoreError, match="weighted"):
        weighted_observability(inv, [rec(0)], paper_tables())


# --- area grouping -----------------------------------------------------------


def test_single_area_equals_whole():
    inv, records = two_signal_inventory()
    whole = weighted_observability(inv, records, paper_tables(), scope="A")
    per_area = score_by_area(inv, records, paper_tables())
    assert per_area == [whole]


def test_area_locality():
    tables = paper_tables()
    inv = [sd(0, area="A"), sd(1, area="A"), sd(2, area="B"), sd(3, area="B")]
    base = [rec(0), rec(1), rec(2), rec(3, ValidityTag.INVALID)]
    perturbed = [rec(0, ValidityTag.FAULTY), rec(1, ValidityTag.NON_CURRENT),
                 rec(2), rec(3, ValidityTag.INVALID)]
    before = {s.scope: s for s in score_by_area(inv, base, tables)}
    after = {s.scope: s for s in score_by_area(inv, perturbed, tables)}
    assert after["B"] == before["B"]
    assert after["A"].weighted < before["A"].weighted


def test_ordering_weighted_desc_then_area():
    tables = WeightTables.constant(1.0)
    inv = [sd(0, area="Z"), sd(1, area="Z"),
           sd(2, area="A"), sd(3, area="A"),
           sd(4, area="M"), sd(5, area="M")]
    records = [rec(0), rec(1, ValidityTag.INVALID),
               rec(2), rec(3),
               rec(4), rec(5)]
    scopes = [s.scope for s in score_by_area(inv, records, tables)]
    # A and M tie at 100 -> alphabetical; Z trails
    assert scopes == ["A", "M", "Z"]


def test_station_scoring():
    inv = [sd(0, station="AS1"), sd(1, station="AS2")]
    records = [rec(0), rec(1, ValidityTag.INVALID)]
    scores = score_by_station(inv, records, paper_tables())
    assert [s.scope for s in scores] == ["A/AS1", "A/AS2"]
    assert scores[0].weighted == 100.0


# --- properties --------------------------------------------------------------

areas_st = st.sampled_from(("A", "B"))


@st.composite
def fixture_st(draw, force_scope=False, min_signals=2, max_signals=20):
    n = draw(st.integers(min_signals, max_signals))
    inventory, records = [], []
    for i in range(n):
        pair = VALID_PAIRS[draw(st.integers(0, 19))]
        inventory.append(SignalDescriptor(
            f"s{i}", draw(areas_st), "S1", pair[0], pair[1],
            in_instruction=draw(st.booleans()),
            weighted_scope=True if force_scope else draw(st.booleans()),
        ))
        tag = draw(st.sampled_from(list(ValidityTag)))
        se = draw(st.booleans()) if tag is ValidityTag.VALID else False
        records.append(SnapshotRecord(f"s{i}", tag, se))
    return inventory, records


@settings(max_examples=60, deadline=None)
@given(fixture_st(force_scope=True), st.data())
def test_flipping_valid_to_invalid_strictly_decreases(fix, data):
    inventory, records = fix
    tables = paper_tables()
    valid_idx = [i for i, r in enumerate(records) if not is_invalid(r, DEFAULT_POLICY)]
    assume(valid_idx)
    i = data.draw(st.sampled_from(valid_idx))
    flipped = list(records)
    flipped[i] = SnapshotRecord(records[i].signal_id, ValidityTag.INVALID)
    before = weighted_observability(inventory, records, tables)
    after = weighted_observability(inventory, flipped, tables)
    assert after.weighted < before.weighted
    assert after.unweighted <= before.unweighted


@settings(max_examples=60, deadline=None)
@given(fixture_st(), st.data())
def test_instruction_multiplier_direction(fix, data):
    inventory, records = fix
    tables = paper_tables()
    in_scope = [i for i, d in enumerate(inventory) if d.weighted_scope
                and not d.in_instruction]
    assume(in_scope)
    i = data.draw(st.sampled_from(in_scope))
    d = inventory[i]
    promoted = list(inventory)
    promoted[i] = SignalDescriptor(d.signal_id, d.area, d.station, d.component,
                                   d.quantity, in_instruction=True,
                                   weighted_scope=True)
    try:
        before = weighted_observability(inventory, records, tables)
    except UndefinedScoreError:
        assume(False)
    after = weighted_observability(promoted, records, tables)
    if is_invalid(records[i], DEFAULT_POLICY):
        assert after.weighted <= before.weighted
    else:
        assert after.weighted >= before.weighted


@settings(max_examples=40, deadline=None)
@given(fixture_st(force_scope=True), st.integers(min_value=-8, max_value=8))
def test_scale_invariance_power_of_two_is_bit_exact(fix, exponent):
    inventory, records = fix
    base = paper_tables()
    scaled = base.scaled(2.0 ** exponent)
    a = weighted_observability(inventory, records, base)
    b = weighted_observability(inventory, records, scaled)
    assert a.weighted == b.weighted
    assert a.unweighted == b.unweighted


@settings(max_examples=40, deadline=None)
@given(fixture_st(force_scope=True),
       st.floats(min_value=0.01, max_value=100.0, allow_nan=False))
def test_scale_invariance_general(fix, factor):
    inventory, records = fix
    a = weighted_observability(inventory, records, paper_tables())
    b = weighted_observability(inventory, records, paper_tables().scaled(factor))
    assert math.isclose(a.weighted, b.weighted, rel_tol=1e-9, abs_tol=1e-9)


@settings(max_examples=60, deadline=None)
@given(fixture_st(force_scope=True))
def test_reduction_to_plain_index(fix):
    inventory, records = fix
    flat = [SignalDescriptor(d.signal_id, d.area, d.station, d.component,
                             d.quantity, in_instruction=False, weighted_scope=True)
            for d in inventory]
    for cell in (1.0, 0.5):
        s = weighted_observability(flat, records, WeightTables.constant(cell))
        assert s.weighted == s.unweighted


@settings(max_examples=40, deadline=None)
@given(fixture_st())
def test_scores_within_bounds(fix):
    inventory, records = fix
    try:
        scores = score_by_area(inventory, records, paper_tables())
    except UndefinedScoreError:
        assume(False)
    for s in scores:
        assert 0.0 <= s.unweighted <= 100.0
        assert 0.0 <= s.weighted <= 100.0
        assert 0 <= s.invalid_raw <= s.total_raw
        assert 0.0 <= s.invalid_weighted <= s.total_weighted


# --- snapshot comparison -----------------------------------------------------


def score_for(area, unweighted, weighted):
    return ObservabilityScore(
        scope=area, total_raw=100, invalid_raw=round(100 - unweighted),
        unweighted=unweighted, total_weighted=1000.0,
        invalid_weighted=1000.0 * (1 - weighted / 100), weighted=weighted,
    )


def test_compare_identical_all_unchanged():
    scores = [score_for("A", 99.0, 97.0), score_for("B", 98.0, 98.0)]
    rep = compare_snapshots(scores, scores)
    assert all(d.weighted_change == "unchanged" for d in rep.deltas)
    assert all(d.unweighted_delta == 0.0 for d in rep.deltas)


def test_compare_improvement():
    before = [score_for("J", 90.0, 80.0)]
    after = [score_for("J", 90.0, 84.0)]
    rep = compare_snapshots(before, after)
    d = rep.deltas[0]
    assert d.weighted_delta == 4.0
    assert d.weighted_change == "improved"
    assert d.unweighted_change == "unchanged"


def test_compare_decline_and_band():
    before = [score_for("A", 99.0, 97.0)]
    after = [score_for("A", 98.51, 96.4)]
    rep = compare_snapshots(before, after)
    d = rep.deltas[0]
    assert d.unweighted_change == "unchanged"  # |delta| < 0.5
    assert d.weighted_change == "declined"


def test_compare_area_mismatch():
    before = [score_for("A", 99.0, 97.0), score_for("B", 98.0, 96.0)]
    after = [score_for("A", 99.0, 97.0)]
    with pytest.raises(ComparisonMismatchError, match="B"):
        compare_snapshots(before, after)
    rep_err = None
    try:
        compare_snapshots(before, after)
    except ComparisonMismatchError as e:
        rep_err = e
    assert rep_err.missing_after == ["B"]


def test_compare_counts():
    before = [score_for("A", 99.0, 97.0), score_for("B", 90.0, 80.0)]
    after = [score_for("A", 99.0, 90.0), score_for("B", 95.0, 84.0)]
    rep = compare_snapshots(before, after)
    counts = rep.counts()
    assert counts["weighted"] == {"improved": 1, "unchanged": 0, "declined": 1}
    assert counts["unweighted"] == {"improved": 1, "unchanged": 1, "declined": 0}
