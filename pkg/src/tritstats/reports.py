"""Deterministic report rendering.

Every number that reaches a file goes through exact integer arithmetic:
frequencies are Fractions, closed-form values are converted from mpmath
binary floats to Fractions without rounding, and fixed-point decimal strings
are produced by integer division with round-half-to-even.  Two runs of the
same scan therefore emit byte-identical files on any platform.

Sigma benchmark columns are genuine floats (they only ever bound noise) and
are rendered in scientific notation with a fixed digit budget.
"""

from __future__ import annotations

import json
import math
import os
from fractions import Fraction
from typing import Iterable, Optional

from mpmath import mp

from . import theory
from .aggregate import AggregateState
from .audit import AuditRow, AuditSummary
from .stats import PerExponentRecord, block_strings

PERCENT_PLACES = 6
DEVIATION_PLACES = 12
PER_N_DEVIATION_PLACES = 9

BLOCK_ANCHOR_NOTE = (
    "blocks are non-overlapping, anchored at the most significant digit; "
    "a trailing remainder shorter than k is discarded"
)

ONE_THIRD = Fraction(1, 3)


# -- exact decimal rendering ---------------------------------------------------


def format_fraction(value: Fraction, places: int) -> str:
    """Fixed-point decimal string with round-half-to-even, exact in, exact out."""
    if places < 0:
        raise ValueError("places must be nonnegative")
    negative = value < 0
    num = -value.numerator if negative else value.numerator
    den = value.denominator
    q, r = divmod(num * 10**places, den)
    doubled = 2 * r
    if doubled > den or (doubled == den and q % 2 == 1):
        q += 1
    text = str(q).rjust(places + 1, "0")
    if places:
        text = text[:-places] + "." + text[-places:]
    return "-" + text if negative else text


def format_percent(value: Fraction, places: int = PERCENT_PLACES) -> str:
    return format_fraction(value * 100, places)


def mpf_to_fraction(x) -> Fraction:
    """Exact rational value of a finite mpmath float."""
    sign, man, exp, _ = mp.mpf(x)._mpf_
    if man == 0:
        if exp == 0:
            return Fraction(0)
        raise ValueError("value is not finite")
    fr = Fraction(int(man)) * Fraction(2) ** int(exp)
    return -fr if sign else fr


def format_mpf(x, places: int) -> str:
    return format_fraction(mpf_to_fraction(x), places)


def format_sigma(x: float) -> str:
    return f"{x:.6e}"


# -- low-level table emission --------------------------------------------------


def write_csv(
    path, header: list[str], rows: Iterable[list[str]], comment: Optional[str] = None
) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def write_json_table(
    path, header: list[str], rows: Iterable[list[str]], comment: Optional[str] = None
) -> None:
    body = {
        "note": comment,
        "rows": [dict(zip(header, row)) for row in rows],
    }
    if comment is None:
        del body["note"]
    with open(path, "w", encoding="ascii") as fh:
        json.dump(body, fh, indent=1)
        fh.write("\n")


def write_table(
    out_dir, name: str, header: list[str], rows: list[list[str]],
    fmt: str, comment: Optional[str] = None,
) -> str:
    if fmt == "csv":
        path = os.path.join(out_dir, f"{name}.csv")
        write_csv(path, header, rows, comment)
    elif fmt == "json":
        path = os.path.join(out_dir, f"{name}.json")
        write_json_table(path, header, rows, comment)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return path


# -- aggregate tables ----------------------------------------------------------

DIGIT_HEADER = [
    "max_n", "digit", "count", "frequency_pct", "deviation",
    "sigma_exact", "sigma_approx",
]
BLOCK_HEADER = [
    "max_n", "k", "block", "count", "frequency_pct", "deviation", "sigma_exact",
]
LEADING_HEADER = [
    "max_n", "depth", "digit", "total_count", "avg_count", "limit_count",
    "avg_minus_limit",
]


def digit_table(state: AggregateState) -> list[list[str]]:
    max_n = state.n_hi
    sigma_exact = theory.sigma_aggregate("digit", state.total_digits)
    sigma_approx = theory.sigma_aggregate_approx(max_n)
    rows = []
    for d in (0, 1, 2):
        freq = state.digit_frequency(d)
        rows.append([
            str(max_n), str(d), str(state.digit_counts[d]),
            format_percent(freq),
            format_fraction(freq - ONE_THIRD, DEVIATION_PLACES),
            format_sigma(sigma_exact), format_sigma(sigma_approx),
        ])
    return rows


def block_table(state: AggregateState, k: int) -> list[list[str]]:
    max_n = state.n_hi
    if state.block_totals[k] == 0:
        return []  # every scanned power was shorter than k digits
    sigma_exact = theory.sigma_aggregate(f"block-{k}", state.block_totals[k])
    expected = Fraction(1, 3**k)
    rows = []
    for s in block_strings(k):
        freq = state.block_frequency(s)
        rows.append([
            str(max_n), str(k), s, str(state.block_counts[k][s]),
            format_percent(freq),
            format_fraction(freq - expected, DEVIATION_PLACES),
            format_sigma(sigma_exact),
        ])
    return rows


def leading_table(state: AggregateState, depth: int) -> list[list[str]]:
    max_n = state.n_hi
    rows = []
    for d in (0, 1, 2):
        avg = state.leading_avg_count(d, depth)
        limit = mpf_to_fraction(theory.limit_average_count(d, depth))
        rows.append([
            str(max_n), str(depth), str(d),
            str(state.leading_counts[depth][d]),
            format_fraction(avg, DEVIATION_PLACES),
            format_fraction(limit, DEVIATION_PLACES),
            format_fraction(avg - limit, DEVIATION_PLACES),
        ])
    return rows


def write_aggregate_reports(out_dir, state: AggregateState, fmt: str) -> list[str]:
    """digits/blocks_k*/leading_H* tables for a finished scan."""
    if state.is_empty:
        raise ValueError("nothing to report: state is empty")
    paths = [write_table(out_dir, "digits", DIGIT_HEADER, digit_table(state), fmt)]
    for k in state.block_lengths:
        paths.append(
            write_table(out_dir, f"blocks_k{k}", BLOCK_HEADER,
                        block_table(state, k), fmt, comment=BLOCK_ANCHOR_NOTE)
        )
    for h in state.leading_depths:
        paths.append(
            write_table(out_dir, f"leading_H{h}", LEADING_HEADER,
                        leading_table(state, h), fmt)
        )
    return paths


def write_run_summary(out_dir, command: str, config: dict, config_hash: str,
                      state: AggregateState) -> str:
    payload = {
        "command": command,
        "config": config,
        "config_hash": config_hash,
        "totals": {
            "exponents": state.exponent_count,
            "digits": str(state.total_digits),
            "blocks": {str(k): str(v) for k, v in state.block_totals.items()},
        },
        "notes": [BLOCK_ANCHOR_NOTE],
    }
    path = os.path.join(out_dir, "run_summary.json")
    with open(path, "w", encoding="ascii") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")
    return path


# -- per-exponent rows ---------------------------------------------------------

PER_N_HEADER = [
    "n", "length", "count0", "count1", "count2",
    "dev0", "dev1", "dev2", "sigma_iid", "zero_run", "leading_digit",
]


def _iid_sigma(length: int) -> float:
    return math.sqrt(2.0 / (9.0 * length))


def per_n_cells(record: PerExponentRecord) -> list[str]:
    cells = [str(record.n), str(record.length)]
    cells += [str(c) for c in record.digits.counts]
    for d in (0, 1, 2):
        dev = Fraction(record.digits.counts[d], record.length) - ONE_THIRD
        cells.append(format_fraction(dev, PER_N_DEVIATION_PLACES))
    cells.append(format_sigma(_iid_sigma(record.length)))
    cells.append(str(record.zero_run))
    cells.append(str(record.leading_digit))
    return cells


class PerExponentWriter:
    """Streaming per-n row sink with checkpoint-aligned flushing.

    Rows accumulate in memory until flush(), which appends them to the file;
    a scan flushes right before each checkpoint.  Long gaps between flushes
    spill early to bound memory, which is safe because a resume trims any
    rows beyond its checkpoint; pass resume_upto to trigger that trim.
    """

    AUTOFLUSH_ROWS = 50_000

    def __init__(self, path, fmt: str = "csv", resume_upto: Optional[int] = None):
        if fmt not in ("csv", "json"):
            raise ValueError(f"unknown format {fmt!r}")
        self.fmt = fmt
        self.path = os.fspath(path)
        self._pending: list[str] = []
        if resume_upto is not None and os.path.exists(self.path):
            self._trim(resume_upto)
            self._fh = open(self.path, "a", encoding="ascii", newline="")
        else:
            self._fh = open(self.path, "w", encoding="ascii", newline="")
            if fmt == "csv":
                self._fh.write(",".join(PER_N_HEADER) + "\n")
                self._fh.flush()

    def _trim(self, resume_upto: int) -> None:
        with open(self.path, "r", encoding="ascii") as fh:
            lines = fh.readlines()
        kept = []
        for i, line in enumerate(lines):
            if self.fmt == "csv" and i == 0:
                kept.append(line)
                continue
            line = line.rstrip("\n")
            if not line:
                continue
            if self.fmt == "csv":
                n = int(line.split(",", 1)[0])
            else:
                n = int(json.loads(line)["n"])
            if n <= resume_upto:
                kept.append(line + "\n")
        with open(self.path, "w", encoding="ascii", newline="") as fh:
            fh.writelines(kept)

    def _render(self, record: PerExponentRecord) -> str:
        cells = per_n_cells(record)
        if self.fmt == "csv":
            return ",".join(cells) + "\n"
        typed = dict(zip(PER_N_HEADER, cells))
        for key in ("n", "length", "count0", "count1", "count2",
                    "zero_run", "leading_digit"):
            typed[key] = int(typed[key])
        return json.dumps(typed) + "\n"

    def add(self, record: PerExponentRecord) -> None:
        self._pending.append(self._render(record))
        if len(self._pending) >= self.AUTOFLUSH_ROWS:
            self.flush()

    def flush(self) -> None:
        if self._pending:
            self._fh.writelines(self._pending)
            self._pending.clear()
        self._fh.flush()

    def close(self, discard_pending: bool = False) -> None:
        if discard_pending:
            self._pending.clear()
        self.flush()
        self._fh.close()

    @property
    def closed(self) -> bool:
        return self._fh.closed

    @staticmethod
    def filename(fmt: str) -> str:
        return "per_n.csv" if fmt == "csv" else "per_n.jsonl"


# -- theory tables ---------------------------------------------------------------

BENFORD_HEADER = ["numeral", "probability"]
LIMITS_HEADER = ["depth", "digit", "limit_count", "normalized", "gap_next"]
SIGMA_HEADER = ["max_n", "kind", "total", "sigma"]


def theory_tables(table: theory.TheoryTable):
    benford_rows = [
        [str(m), format_mpf(p, DEVIATION_PLACES)] for m, p in table.benford.items()
    ]
    limit_rows = []
    for depth in range(table.max_depth + 1):
        for d in (0, 1, 2):
            value = mpf_to_fraction(table.limits[(depth, d)])
            cells = [
                str(depth), str(d),
                format_fraction(value, DEVIATION_PLACES),
                format_fraction(value / (depth + 1), DEVIATION_PLACES),
            ]
            if depth < table.max_depth:
                cells.append(format_mpf(table.gaps[(depth, d)], DEVIATION_PLACES))
            else:
                cells.append("")
            limit_rows.append(cells)
    sigma_rows = []
    for bench in table.sigma:
        sigma_rows.append([str(bench.max_n), "digit", str(bench.total_digits),
                           format_sigma(bench.sigma_digit)])
        for kind, total, sigma in (
            ("block-2", bench.total_blocks2, bench.sigma_block2),
            ("block-3", bench.total_blocks3, bench.sigma_block3),
        ):
            cell = format_sigma(sigma) if sigma is not None else ""
            sigma_rows.append([str(bench.max_n), kind, str(total), cell])
        sigma_rows.append([str(bench.max_n), "iid-approx", "",
                           format_sigma(bench.sigma_digit_approx)])
    return benford_rows, limit_rows, sigma_rows


def write_theory_reports(out_dir, table: theory.TheoryTable, fmt: str) -> list[str]:
    benford_rows, limit_rows, sigma_rows = theory_tables(table)
    return [
        write_table(out_dir, "benford", BENFORD_HEADER, benford_rows, fmt),
        write_table(out_dir, "limits", LIMITS_HEADER, limit_rows, fmt),
        write_table(out_dir, "sigma", SIGMA_HEADER, sigma_rows, fmt),
    ]


# -- audit tables -----------------------------------------------------------------

AUDIT_HEADER = [
    "n", "leading_digit", "predicted_leading_digit", "agree", "zero_run",
    "running_max_zero_run", "ln_n", "contains_two", "relation_ok",
]


def _bool_cell(value) -> str:
    if value is None:
        return ""
    return "true" if value else "false"


def audit_cells(row: AuditRow) -> list[str]:
    return [
        str(row.n), str(row.leading_digit), str(row.predicted_leading_digit),
        _bool_cell(row.predicted_leading_digit == row.leading_digit),
        str(row.zero_run), str(row.running_max_zero_run),
        f"{row.ln_n:.6f}", _bool_cell(row.contains_two), _bool_cell(row.relation_ok),
    ]


class AuditRowCollector:
    """Sink for audit rows; holds formatted cells for one write at the end."""

    def __init__(self):
        self.rows: list[list[str]] = []

    def add(self, row: AuditRow) -> None:
        self.rows.append(audit_cells(row))

    def flush(self) -> None:
        pass


def write_audit_reports(out_dir, summary: AuditSummary,
                        collector: AuditRowCollector, fmt: str) -> list[str]:
    paths = [write_table(out_dir, "audit_per_n", AUDIT_HEADER, collector.rows, fmt)]
    payload = {
        "max_n": summary.max_n,
        "no_two_exponents": list(summary.no_two_exponents),
        "prediction_mismatches": list(summary.prediction_mismatches),
        "relation_violations": list(summary.relation_violations),
        "max_zero_run": summary.max_zero_run,
        "max_zero_run_at": summary.max_zero_run_at,
        "ln_max_n": f"{math.log(summary.max_n):.6f}",
    }
    path = os.path.join(out_dir, "audit_summary.json")
    with open(path, "w", encoding="ascii") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")
    paths.append(path)
    return paths


# -- alpha tables ------------------------------------------------------------------

ALPHA_DIGIT_HEADER = ["digit_count", "digit", "count", "frequency_pct"]
ALPHA_BLOCK_HEADER = ["digit_count", "k", "block", "count", "frequency_pct"]


def alpha_digit_table(digit_count: int, tally) -> list[list[str]]:
    rows = []
    for d in (0, 1, 2):
        rows.append([
            str(digit_count), str(d), str(tally.counts[d]),
            format_percent(Fraction(tally.counts[d], digit_count)),
        ])
    return rows


def alpha_block_table(digit_count: int, k: int, tally) -> list[list[str]]:
    rows = []
    for s in block_strings(k):
        count = tally.counts.get(s, 0)
        rows.append([
            str(digit_count), str(k), s, str(count),
            format_percent(Fraction(count, tally.blocks_total)),
        ])
    return rows
