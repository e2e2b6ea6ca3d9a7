import json
import os
from fractions import Fraction

import pytest

import naive_reference as ref
from tritstats import aggregate, sweep
from tritstats.aggregate import (
    AggregateState,
    CheckpointCorrupt,
    CheckpointMismatch,
    merge,
)
from tritstats.stats import per_exponent_record
from tritstats.trit_core import from_exponent


def state_through(max_n, blocks=(2, 3), depths=(0, 1, 2, 3)):
    state = AggregateState.empty(blocks, depths)
    for n in range(1, max_n + 1):
        state.update(per_exponent_record(n, from_exponent(n), blocks, depths))
    return state


def test_update_from_empty():
    state = AggregateState.empty()
    assert state.is_empty and state.exponent_count == 0
    state.update(per_exponent_record(1, from_exponent(1)))
    assert (state.n_lo, state.n_hi) == (1, 1)
    assert state.total_digits == 1
    assert state.digit_counts == [0, 0, 1]
    assert state.digit_frequency(2) == 1


def test_update_accumulates_lengths():
    state = state_through(4)
    before = state.total_digits
    state.update(per_exponent_record(5, from_exponent(5)))
    assert state.total_digits == before + 4  # 2**5 = 1012 has four digits


def test_update_rejects_gaps_and_overlaps():
    state = state_through(4)
    for bad in (4, 6, 1):
        with pytest.raises(ValueError):
            state.update(per_exponent_record(bad, from_exponent(bad)))
    fresh = AggregateState.empty()
    with pytest.raises(ValueError):
        fresh.update(per_exponent_record(0, from_exponent(0)))


def test_update_rejects_missing_tables():
    state = AggregateState.empty(block_lengths=(2, 5))
    with pytest.raises(ValueError):
        state.update(per_exponent_record(1, from_exponent(1), (2, 3)))
    state = AggregateState.empty(leading_depths=(0, 7))
    with pytest.raises(ValueError):
        state.update(per_exponent_record(1, from_exponent(1), (2, 3), (0, 1)))


def test_empty_config_validation():
    with pytest.raises(ValueError):
        AggregateState.empty(block_lengths=(0,))
    with pytest.raises(ValueError):
        AggregateState.empty(block_lengths=(2, 2))
    with pytest.raises(ValueError):
        AggregateState.empty(leading_depths=(-1,))


def test_merge_with_empty_is_identity():
    state = state_through(30)
    empty = AggregateState.empty()
    for combined in (merge(empty, state), merge(state, empty)):
        assert combined.to_payload() == state.to_payload()
    both = merge(empty, AggregateState.empty())
    assert both.is_empty


def test_merge_requires_abutting_ranges():
    a = state_through(10)
    b = AggregateState.empty()
    for n in range(12, 16):
        b.update(per_exponent_record(n, from_exponent(n)))
    with pytest.raises(ValueError):
        merge(a, b)  # gap at 11
    with pytest.raises(ValueError):
        merge(b, a)  # wrong order
    with pytest.raises(ValueError):
        merge(a, a)  # overlap


def test_merge_requires_matching_config():
    a = AggregateState.empty(block_lengths=(2,))
    b = AggregateState.empty(block_lengths=(2, 3))
    with pytest.raises(ValueError):
        merge(a, b)


def test_merge_is_associative_and_matches_sequential():
    parts = []
    for lo, hi in ((1, 10), (11, 20), (21, 30)):
        part = AggregateState.empty()
        for n in range(lo, hi + 1):
            part.update(per_exponent_record(n, from_exponent(n)))
        parts.append(part)
    left = merge(merge(parts[0], parts[1]), parts[2])
    right = merge(parts[0], merge(parts[1], parts[2]))
    direct = state_through(30)
    assert left.to_payload() == right.to_payload() == direct.to_payload()


def test_shard_split_equals_sequential_bitwise():
    direct = sweep.run_sweep(120)
    for shards in (2, 3, 7):
        split = sweep.run_sweep(120, shards=shards)
        assert split.to_payload() == direct.to_payload()


def test_frequencies_against_reference():
    state = state_through(100)
    oracle = ref.SweepTotals(100)
    assert state.total_digits == oracle.total_digits
    for d in (0, 1, 2):
        assert state.digit_frequency(d) == oracle.digit_frequency(d)
    for k in (2, 3):
        assert state.block_totals[k] == oracle.block_totals[k]
        for block, count in oracle.block_tables[k].items():
            assert state.block_counts[k][block] == count
            assert state.block_frequency(block) == oracle.block_frequency(block)
    for h in (0, 1, 2, 3):
        for d in (0, 1, 2):
            assert state.leading_avg_count(d, h) == oracle.leading_average(d, h)


def test_frequency_identities_are_exact():
    state = state_through(150)
    assert sum(state.digit_frequency(d) for d in (0, 1, 2)) == 1
    for k in (2, 3):
        from tritstats.stats import block_strings

        assert sum(state.block_frequency(s) for s in block_strings(k)) == 1


def test_weighted_average_identity():
    # aggregate frequency is the length-weighted average of per-n frequencies
    blocks, depths = (2, 3), (0, 1, 2, 3)
    records = [
        per_exponent_record(n, from_exponent(n), blocks, depths)
        for n in range(1, 201)
    ]
    state = AggregateState.empty(blocks, depths)
    for rec in records:
        state.update(rec)
    total = state.total_digits
    for d in (0, 1, 2):
        weighted = sum(
            Fraction(rec.digits.counts[d], rec.length) * Fraction(rec.length, total)
            for rec in records
        )
        assert weighted == state.digit_frequency(d)


def test_leading_avg_examples():
    state = state_through(5)
    # leading digits of 2^1..2^5 are 2, 1, 2, 1, 1
    assert state.leading_avg_count(1, 0) == Fraction(3, 5)
    assert state.leading_avg_count(2, 0) == Fraction(2, 5)
    assert state.leading_avg_count(0, 0) == 0


def test_block_frequency_small_case():
    state = state_through(3)  # digits: 2, 11, 22 -> k=2 blocks: 11, 22
    assert state.block_frequency("11") == Fraction(1, 2)
    assert state.block_frequency("22") == Fraction(1, 2)
    assert state.block_frequency("00") == 0


def test_frequency_domain_errors():
    state = state_through(10)
    with pytest.raises(ValueError):
        state.digit_frequency(3)
    with pytest.raises(ValueError):
        state.block_frequency("0102")  # k=4 not configured
    with pytest.raises(ValueError):
        state.block_frequency("0x")
    with pytest.raises(ValueError):
        state.leading_avg_count(0, 9)
    empty = AggregateState.empty()
    with pytest.raises(ValueError):
        empty.digit_frequency(0)
    with pytest.raises(ValueError):
        empty.leading_avg_count(0, 0)
    with pytest.raises(ValueError):
        empty.block_frequency("01")


def test_payload_round_trip():
    state = state_through(64)
    clone = AggregateState.from_payload(state.to_payload())
    assert clone.to_payload() == state.to_payload()
    assert clone.digit_frequency(1) == state.digit_frequency(1)


def test_payload_integers_serialized_as_strings():
    payload = state_through(5).to_payload()
    assert isinstance(payload["total_digits"], str)
    assert all(isinstance(c, str) for c in payload["digit_counts"])
    assert all(
        isinstance(c, str)
        for table in payload["block_counts"].values()
        for c in table.values()
    )
    json.dumps(payload)  # JSON-ready as-is


def test_from_payload_rejects_inconsistent_state():
    payload = state_through(10).to_payload()
    payload["digit_counts"][0] = str(int(payload["digit_counts"][0]) + 1)
    with pytest.raises(CheckpointCorrupt):
        AggregateState.from_payload(payload)
    payload = state_through(10).to_payload()
    del payload["block_totals"]
    with pytest.raises(CheckpointCorrupt):
        AggregateState.from_payload(payload)


def test_validate_catches_tampering():
    state = state_through(10)
    state.validate()
    state.block_totals[2] += 1
    with pytest.raises(ValueError):
        state.validate()


def test_checkpoint_round_trip(tmp_path):
    state = state_through(40)
    config = {"max_n": 40, "blocks": [2, 3]}
    path = tmp_path / "ck.json"
    aggregate.write_checkpoint(path, state, 40, config)
    assert not (tmp_path / "ck.json.tmp").exists()
    payload = aggregate.read_checkpoint(path)
    assert int(payload["n_completed"]) == 40
    assert payload["config"] == config
    restored = AggregateState.from_payload(payload["state"])
    assert restored.to_payload() == state.to_payload()


def test_checkpoint_detects_config_tampering(tmp_path):
    state = state_through(20)
    path = tmp_path / "ck.json"
    aggregate.write_checkpoint(path, state, 20, {"max_n": 20})
    raw = json.loads(path.read_text())
    raw["config"]["max_n"] = 2000
    path.write_text(json.dumps(raw))
    with pytest.raises(CheckpointMismatch):
        aggregate.read_checkpoint(path)


def test_checkpoint_rejects_garbage(tmp_path):
    path = tmp_path / "ck.json"
    path.write_text("not json at all{")
    with pytest.raises(CheckpointCorrupt):
        aggregate.read_checkpoint(path)
    path.write_text(json.dumps({"format_version": 99}))
    with pytest.raises(CheckpointCorrupt):
        aggregate.read_checkpoint(path)
    path.write_text(json.dumps([1, 2, 3]))
    with pytest.raises(CheckpointCorrupt):
        aggregate.read_checkpoint(path)
    with pytest.raises(CheckpointCorrupt):
        aggregate.read_checkpoint(tmp_path / "missing.json")


def test_config_fingerprint_is_order_insensitive():
    a = aggregate.config_fingerprint({"x": 1, "y": [2, 3]})
    b = aggregate.config_fingerprint({"y": [2, 3], "x": 1})
    assert a == b
    assert a != aggregate.config_fingerprint({"x": 1, "y": [3, 2]})
