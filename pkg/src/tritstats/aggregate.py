"""Mergeable aggregate totals over a contiguous range of exponents.

An :class:`AggregateState` holds exact integer tallies for the exponents
n_lo..n_hi it has absorbed.  Updates must arrive in exponent order with no
gaps, and two states merge only when their ranges abut; both rules exist so
that any split of 1..N into contiguous shards reproduces the sequential
result bit for bit.

Checkpoints serialize the full state as JSON with every integer rendered as
a decimal string (no reader should have to trust its JSON parser above
2**53), plus a SHA-256 fingerprint of the run configuration so a resume
cannot silently continue somebody else's scan.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .stats import PerExponentRecord, block_strings


class CheckpointCorrupt(ValueError):
    """Checkpoint file is unreadable or structurally wrong."""


class CheckpointMismatch(ValueError):
    """Checkpoint is well-formed but its config fingerprint does not match."""


@dataclass
class AggregateState:
    """Exact tallies over exponents n_lo..n_hi (empty when n_lo is None)."""

    block_lengths: tuple[int, ...]
    leading_depths: tuple[int, ...]
    n_lo: int | None = None
    n_hi: int | None = None
    total_digits: int = 0
    digit_counts: list[int] = field(default_factory=lambda: [0, 0, 0])
    block_counts: dict[int, dict[str, int]] = field(default_factory=dict)
    block_totals: dict[int, int] = field(default_factory=dict)
    leading_counts: dict[int, list[int]] = field(default_factory=dict)

    @classmethod
    def empty(
        cls,
        block_lengths: Iterable[int] = (2, 3),
        leading_depths: Iterable[int] = (0, 1, 2, 3),
    ) -> "AggregateState":
        blocks = tuple(int(k) for k in block_lengths)
        depths = tuple(int(h) for h in leading_depths)
        if any(k < 1 for k in blocks):
            raise ValueError("block lengths must be at least 1")
        if any(h < 0 for h in depths):
            raise ValueError("leading depths must be nonnegative")
        if len(set(blocks)) != len(blocks) or len(set(depths)) != len(depths):
            raise ValueError("duplicate block length or leading depth")
        state = cls(block_lengths=blocks, leading_depths=depths)
        for k in blocks:
            state.block_counts[k] = {s: 0 for s in block_strings(k)}
            state.block_totals[k] = 0
        for h in depths:
            state.leading_counts[h] = [0, 0, 0]
        return state

    # -- basic facts --------------------------------------------------------

    @property
    def is_empty(self) -> bool:
        return self.n_lo is None

    @property
    def exponent_count(self) -> int:
        if self.n_lo is None:
            return 0
        return self.n_hi - self.n_lo + 1

    def _same_config(self, other: "AggregateState") -> bool:
        return (
            self.block_lengths == other.block_lengths
            and self.leading_depths == other.leading_depths
        )

    # -- accumulation --------------------------------------------------------

    def update(self, record: PerExponentRecord) -> None:
        """Absorb the tallies of the next exponent (must be n_hi + 1)."""
        if self.n_lo is None:
            if record.n < 1:
                raise ValueError("exponents start at 1")
        elif record.n != self.n_hi + 1:
            raise ValueError(
                f"non-contiguous update: state ends at {self.n_hi}, got {record.n}"
            )
        for k in self.block_lengths:
            if k not in record.blocks:
                raise ValueError(f"record lacks block length {k}")
        for h in self.leading_depths:
            if h not in record.leading:
                raise ValueError(f"record lacks leading depth {h}")

        if self.n_lo is None:
            self.n_lo = record.n
        self.n_hi = record.n
        self.total_digits += record.length
        for d in (0, 1, 2):
            self.digit_counts[d] += record.digits.counts[d]
        for k in self.block_lengths:
            tally = record.blocks[k]
            self.block_totals[k] += tally.blocks_total
            bucket = self.block_counts[k]
            for s, c in tally.counts.items():
                bucket[s] += c
        for h in self.leading_depths:
            counts = record.leading[h].counts
            acc = self.leading_counts[h]
            for d in (0, 1, 2):
                acc[d] += counts[d]

    def copy(self) -> "AggregateState":
        out = AggregateState(
            block_lengths=self.block_lengths,
            leading_depths=self.leading_depths,
            n_lo=self.n_lo,
            n_hi=self.n_hi,
            total_digits=self.total_digits,
            digit_counts=list(self.digit_counts),
        )
        out.block_counts = {k: dict(v) for k, v in self.block_counts.items()}
        out.block_totals = dict(self.block_totals)
        out.leading_counts = {h: list(v) for h, v in self.leading_counts.items()}
        return out

    # -- derived frequencies --------------------------------------------------

    def digit_frequency(self, d: int) -> Fraction:
        """Exact aggregate frequency of digit d."""
        if d not in (0, 1, 2):
            raise ValueError("digit must be 0, 1, or 2")
        if self.total_digits == 0:
            raise ValueError("empty state has no frequencies")
        return Fraction(self.digit_counts[d], self.total_digits)

    def block_frequency(self, block: str) -> Fraction:
        """Exact aggregate frequency of a digit block."""
        k = len(block)
        if k not in self.block_counts:
            raise ValueError(f"block length {k} not configured")
        if any(ch not in "012" for ch in block):
            raise ValueError("block must consist of digits 0, 1, 2")
        if self.block_totals[k] == 0:
            raise ValueError("no blocks of this length tallied")
        return Fraction(self.block_counts[k][block], self.block_totals[k])

    def leading_avg_count(self, d: int, depth: int) -> Fraction:
        """Exact average leading count of digit d at the given depth."""
        if d not in (0, 1, 2):
            raise ValueError("digit must be 0, 1, or 2")
        if depth not in self.leading_counts:
            raise ValueError(f"leading depth {depth} not configured")
        if self.exponent_count == 0:
            raise ValueError("empty state has no averages")
        return Fraction(self.leading_counts[depth][d], self.exponent_count)

    # -- consistency -----------------------------------------------------------

    def validate(self) -> None:
        """Raise ValueError on any internal inconsistency."""
        if (self.n_lo is None) != (self.n_hi is None):
            raise ValueError("half-empty exponent range")
        if self.n_lo is not None and not 1 <= self.n_lo <= self.n_hi:
            raise ValueError("bad exponent range")
        if self.is_empty and self.total_digits != 0:
            raise ValueError("empty state with digit tallies")
        if sum(self.digit_counts) != self.total_digits:
            raise ValueError("digit counts do not sum to the digit total")
        if min(self.digit_counts) < 0 or self.total_digits < 0:
            raise ValueError("negative tally")
        if set(self.block_counts) != set(self.block_lengths) or set(
            self.block_totals
        ) != set(self.block_lengths):
            raise ValueError("block tables do not match the configured lengths")
        for k in self.block_lengths:
            table = self.block_counts[k]
            if set(table) != set(block_strings(k)):
                raise ValueError(f"length-{k} block table has wrong keys")
            if sum(table.values()) != self.block_totals[k]:
                raise ValueError(f"length-{k} block counts do not sum to the total")
            if self.block_totals[k] > self.total_digits // k:
                raise ValueError(f"length-{k} block total exceeds the digit budget")
        if set(self.leading_counts) != set(self.leading_depths):
            raise ValueError("leading tables do not match the configured depths")
        for h in self.leading_depths:
            row = self.leading_counts[h]
            if len(row) != 3 or min(row) < 0:
                raise ValueError(f"bad leading tally at depth {h}")
            if sum(row) > (h + 1) * self.exponent_count:
                raise ValueError(f"depth-{h} leading tally exceeds its budget")

    # -- serialization -----------------------------------------------------------

    def to_payload(self) -> dict:
        """JSON-ready dict; every integer tally is a decimal string."""
        return {
            "block_lengths": list(self.block_lengths),
            "leading_depths": list(self.leading_depths),
            "n_lo": None if self.n_lo is None else str(self.n_lo),
            "n_hi": None if self.n_hi is None else str(self.n_hi),
            "total_digits": str(self.total_digits),
            "digit_counts": [str(c) for c in self.digit_counts],
            "block_totals": {str(k): str(v) for k, v in self.block_totals.items()},
            "block_counts": {
                str(k): {s: str(c) for s, c in table.items()}
                for k, table in self.block_counts.items()
            },
            "leading_counts": {
                str(h): [str(c) for c in row]
                for h, row in self.leading_counts.items()
            },
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "AggregateState":
        try:
            state = cls(
                block_lengths=tuple(int(k) for k in payload["block_lengths"]),
                leading_depths=tuple(int(h) for h in payload["leading_depths"]),
                n_lo=None if payload["n_lo"] is None else int(payload["n_lo"]),
                n_hi=None if payload["n_hi"] is None else int(payload["n_hi"]),
                total_digits=int(payload["total_digits"]),
                digit_counts=[int(c) for c in payload["digit_counts"]],
            )
            state.block_totals = {
                int(k): int(v) for k, v in payload["block_totals"].items()
            }
            state.block_counts = {
                int(k): {s: int(c) for s, c in table.items()}
                for k, table in payload["block_counts"].items()
            }
            state.leading_counts = {
                int(h): [int(c) for c in row]
                for h, row in payload["leading_counts"].items()
            }
        except (KeyError, TypeError, ValueError) as exc:
            raise CheckpointCorrupt(f"malformed aggregate payload: {exc}") from exc
        try:
            state.validate()
        except ValueError as exc:
            raise CheckpointCorrupt(f"inconsistent aggregate payload: {exc}") from exc
        return state


def merge(a: AggregateState, b: AggregateState) -> AggregateState:
    """Combine two adjacent shard states into one (a's range, then b's)."""
    if not a._same_config(b):
        raise ValueError("cannot merge states with different configurations")
    if a.is_empty:
        return b.copy()
    if b.is_empty:
        return a.copy()
    if b.n_lo != a.n_hi + 1:
        raise ValueError(
            f"ranges do not abut: {a.n_lo}..{a.n_hi} then {b.n_lo}..{b.n_hi}"
        )
    out = a.copy()
    out.n_hi = b.n_hi
    out.total_digits += b.total_digits
    for d in (0, 1, 2):
        out.digit_counts[d] += b.digit_counts[d]
    for k in out.block_lengths:
        out.block_totals[k] += b.block_totals[k]
        bucket = out.block_counts[k]
        for s, c in b.block_counts[k].items():
            bucket[s] += c
    for h in out.leading_depths:
        row = out.leading_counts[h]
        for d in (0, 1, 2):
            row[d] += b.leading_counts[h][d]
    return out


# -- checkpoints ----------------------------------------------------------------

CHECKPOINT_VERSION = 1


def config_fingerprint(config: dict) -> str:
    """SHA-256 over the canonical JSON encoding of a run configuration."""
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("ascii")).hexdigest()


def write_checkpoint(path, state: AggregateState, n_completed: int, config: dict) -> None:
    """Atomically write a resumable snapshot (temp file, then rename)."""
    payload = {
        "format_version": CHECKPOINT_VERSION,
        "config": config,
        "config_hash": config_fingerprint(config),
        "n_completed": str(n_completed),
        "state": state.to_payload(),
    }
    path = os.fspath(path)
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="ascii") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def read_checkpoint(path) -> dict:
    """Load and integrity-check a checkpoint; returns the raw payload.

    Raises CheckpointCorrupt for anything unparseable or structurally wrong
    and CheckpointMismatch when the stored fingerprint does not match the
    stored config.
    """
    try:
        with open(path, "r", encoding="ascii") as fh:
            payload = json.load(fh)
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CheckpointCorrupt(f"cannot read checkpoint: {exc}") from exc
    if not isinstance(payload, dict):
        raise CheckpointCorrupt("checkpoint is not a JSON object")
    for key in ("format_version", "config", "config_hash", "n_completed", "state"):
        if key not in payload:
            raise CheckpointCorrupt(f"checkpoint lacks field {key!r}")
    if payload["format_version"] != CHECKPOINT_VERSION:
        raise CheckpointCorrupt(
            f"unsupported checkpoint version {payload['format_version']!r}"
        )
    if config_fingerprint(payload["config"]) != payload["config_hash"]:
        raise CheckpointMismatch("checkpoint config fingerprint does not match")
    try:
        int(payload["n_completed"])
    except (TypeError, ValueError) as exc:
        raise CheckpointCorrupt("n_completed is not an integer") from exc
    return payload
