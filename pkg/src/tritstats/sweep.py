"""Scan engines over consecutive powers of two.

A scan seeds 2**n_lo by direct radix conversion and then doubles in place,
tallying each exponent into an :class:`~tritstats.aggregate.AggregateState`.
Shards are contiguous exponent ranges scanned independently (each seeds its
own start) and merged in ascending order; by construction the merged state is
bit-identical to a single-shard scan.

Checkpointed scans flush the per-exponent row sink before every snapshot, so
after a crash the row file never runs ahead of the checkpoint by more than a
truncation (the writer trims on resume).
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Optional, Protocol

from . import aggregate
from .aggregate import AggregateState
from .stats import PerExponentRecord, per_exponent_record
from .trit_core import double_in_place, from_exponent

log = logging.getLogger(__name__)

LOG_EVERY = 100_000


class RecordSink(Protocol):
    """Consumer of per-exponent rows with checkpoint-aligned flushes."""

    def add(self, record: PerExponentRecord) -> None: ...

    def flush(self) -> None: ...


@dataclass(frozen=True)
class SweepOutcome:
    state: AggregateState
    n_completed: int
    completed: bool


def iter_records(
    n_lo: int,
    n_hi: int,
    block_lengths: tuple[int, ...],
    leading_depths: tuple[int, ...],
) -> Iterator[PerExponentRecord]:
    """Per-exponent tallies for n = n_lo..n_hi, one doubling per step."""
    if not 1 <= n_lo <= n_hi:
        raise ValueError("need 1 <= n_lo <= n_hi")
    x = from_exponent(n_lo)
    n = n_lo
    while True:
        yield per_exponent_record(n, x, block_lengths, leading_depths)
        if n == n_hi:
            return
        double_in_place(x)
        n += 1


def split_ranges(max_n: int, shards: int) -> list[tuple[int, int]]:
    """Split 1..max_n into `shards` contiguous ranges of near-equal size."""
    if max_n < 1:
        raise ValueError("max_n must be at least 1")
    if not 1 <= shards <= max_n:
        raise ValueError("shards must be between 1 and max_n")
    base, extra = divmod(max_n, shards)
    ranges = []
    lo = 1
    for i in range(shards):
        hi = lo + base - 1 + (1 if i < extra else 0)
        ranges.append((lo, hi))
        lo = hi + 1
    return ranges


def scan_range(
    n_lo: int,
    n_hi: int,
    block_lengths: tuple[int, ...] = (2, 3),
    leading_depths: tuple[int, ...] = (0, 1, 2, 3),
    sink: Optional[RecordSink] = None,
) -> AggregateState:
    """Aggregate one contiguous exponent range."""
    state = AggregateState.empty(block_lengths, leading_depths)
    started = time.monotonic()
    for record in iter_records(n_lo, n_hi, block_lengths, leading_depths):
        state.update(record)
        if sink is not None:
            sink.add(record)
        if record.n % LOG_EVERY == 0:
            log.info(
                "scan at n=%d (%.1f s elapsed, %d digits so far)",
                record.n, time.monotonic() - started, state.total_digits,
            )
    if sink is not None:
        sink.flush()
    return state


def run_sweep(
    max_n: int,
    block_lengths: tuple[int, ...] = (2, 3),
    leading_depths: tuple[int, ...] = (0, 1, 2, 3),
    shards: int = 1,
    sink: Optional[RecordSink] = None,
) -> AggregateState:
    """Scan 1..max_n in contiguous shards and merge ascending."""
    merged: Optional[AggregateState] = None
    for lo, hi in split_ranges(max_n, shards):
        part = scan_range(lo, hi, block_lengths, leading_depths, sink=sink)
        merged = part if merged is None else aggregate.merge(merged, part)
    assert merged is not None
    return merged


def run_checkpointed_sweep(
    max_n: int,
    checkpoint_every: int,
    checkpoint_path,
    config: dict,
    block_lengths: tuple[int, ...] = (2, 3),
    leading_depths: tuple[int, ...] = (0, 1, 2, 3),
    sink: Optional[RecordSink] = None,
    state: Optional[AggregateState] = None,
    start_n: int = 1,
    stop_after: Optional[int] = None,
) -> SweepOutcome:
    """Single-shard scan that snapshots every `checkpoint_every` exponents.

    `state`/`start_n` continue a previous run (state must end at start_n - 1).
    `stop_after` abandons the scan right after that exponent without flushing
    or snapshotting; tests use it to simulate a crash.
    """
    if checkpoint_every < 1:
        raise ValueError("checkpoint_every must be at least 1")
    if state is None:
        state = AggregateState.empty(block_lengths, leading_depths)
    if start_n > max_n:
        return SweepOutcome(state, max_n, True)
    last_snapshot = None
    for record in iter_records(start_n, max_n, block_lengths, leading_depths):
        state.update(record)
        if sink is not None:
            sink.add(record)
        if stop_after is not None and record.n >= stop_after and record.n < max_n:
            return SweepOutcome(state, record.n, False)
        if record.n % checkpoint_every == 0:
            if sink is not None:
                sink.flush()
            aggregate.write_checkpoint(checkpoint_path, state, record.n, config)
            last_snapshot = record.n
        if record.n % LOG_EVERY == 0:
            log.info("checkpointed scan at n=%d", record.n)
    if sink is not None:
        sink.flush()
    if last_snapshot != max_n:
        aggregate.write_checkpoint(checkpoint_path, state, max_n, config)
    return SweepOutcome(state, max_n, True)
