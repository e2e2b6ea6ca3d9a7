"""Structural audit of the digit strings of 2**n for n = 1..max_n.

Per exponent the audit records the leading digit (actual and predicted from
the alpha fixed point), the zero run just below the leading digit, whether
any digit 2 occurs, and, when the leading digit is 2, whether the previous
exponent led with 1 and a zero run at least as long (the halving relation:
if 2**n = 2*3**m + r with r < 3**(m-z), then 2**(n-1) = 3**m + r/2).

The zero-run maxima are reported next to ln(n) as a growth reference; the
audit asserts nothing about that comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional

from . import stats, theory
from .trit_core import double_in_place, from_exponent

MIN_AUDIT_RANGE = 9  # the digit-2-free exceptions live at n = 2 and n = 8


@dataclass(frozen=True)
class AuditRow:
    n: int
    leading_digit: int
    predicted_leading_digit: int
    zero_run: int
    running_max_zero_run: int
    ln_n: float
    contains_two: bool
    relation_ok: Optional[bool]  # None unless the leading digit is 2


@dataclass(frozen=True)
class AuditSummary:
    max_n: int
    no_two_exponents: tuple[int, ...]
    prediction_mismatches: tuple[int, ...]
    relation_violations: tuple[int, ...]
    max_zero_run: int
    max_zero_run_at: int


def iter_audit_rows(max_n: int) -> Iterator[AuditRow]:
    """Audit rows for n = 1..max_n, one doubling per step."""
    if max_n < MIN_AUDIT_RANGE:
        raise ValueError(f"audit needs max_n >= {MIN_AUDIT_RANGE}")
    x = from_exponent(0)
    prev_leading = x.leading_digit
    prev_zero_run = stats.zero_run_after_leading(x)
    running_max = 0
    best_at = 0
    for n in range(1, max_n + 1):
        double_in_place(x)
        leading = x.leading_digit
        zero_run = stats.zero_run_after_leading(x)
        if zero_run > running_max:
            running_max = zero_run
            best_at = n
        relation_ok: Optional[bool] = None
        if leading == 2:
            relation_ok = prev_leading == 1 and prev_zero_run >= zero_run
        yield AuditRow(
            n=n,
            leading_digit=leading,
            predicted_leading_digit=theory.predicted_leading_digit(n),
            zero_run=zero_run,
            running_max_zero_run=running_max,
            ln_n=math.log(n),
            contains_two=stats.contains_digit(x, 2),
            relation_ok=relation_ok,
        )
        prev_leading = leading
        prev_zero_run = zero_run


def run_audit(max_n: int, sink=None) -> AuditSummary:
    """Scan 1..max_n; optionally stream rows into a sink with .add()/.flush()."""
    no_two: list[int] = []
    bad_predictions: list[int] = []
    bad_relations: list[int] = []
    max_zero_run = 0
    max_zero_run_at = 0
    for row in iter_audit_rows(max_n):
        if not row.contains_two:
            no_two.append(row.n)
        if row.predicted_leading_digit != row.leading_digit:
            bad_predictions.append(row.n)
        if row.relation_ok is False:
            bad_relations.append(row.n)
        if row.zero_run > max_zero_run:
            max_zero_run = row.zero_run
            max_zero_run_at = row.n
        if sink is not None:
            sink.add(row)
    if sink is not None:
        sink.flush()
    return AuditSummary(
        max_n=max_n,
        no_two_exponents=tuple(no_two),
        prediction_mismatches=tuple(bad_predictions),
        relation_violations=tuple(bad_relations),
        max_zero_run=max_zero_run,
        max_zero_run_at=max_zero_run_at,
    )
