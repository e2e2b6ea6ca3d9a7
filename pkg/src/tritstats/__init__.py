"""Exact ternary-digit statistics of powers of two and of log3(2).

The package scans the base-3 digit strings of 2**n with exact integer
arithmetic only: a digit buffer that supports in-place doubling, per-exponent
tallies, mergeable aggregates with checkpoint/resume, closed-form reference
values (digit-string lengths, base-3 Benford weights, sigma benchmarks), and
a certified ternary expansion of alpha = log3(2).
"""

from .aggregate import AggregateState, merge
from .alpha import AlphaExpansion, expand, verify_prefix
from .stats import (
    BlockTally,
    DigitTally,
    PerExponentRecord,
    block_counts,
    contains_digit,
    digit_counts,
    leading_counts,
    leading_value,
    per_exponent_record,
    zero_run_after_leading,
)
from .sweep import run_sweep, scan_range
from .theory import (
    benford_probability,
    length_formula,
    length_sums,
    limit_average_count,
    predicted_leading_digit,
    recurrence_gap,
    sigma_aggregate,
    sigma_aggregate_approx,
    sigma_single,
)
from .trit_core import TernaryNumber, double_in_place, from_exponent, from_integer

__version__ = "0.1.0"

__all__ = [
    "AggregateState",
    "AlphaExpansion",
    "BlockTally",
    "DigitTally",
    "PerExponentRecord",
    "TernaryNumber",
    "benford_probability",
    "block_counts",
    "contains_digit",
    "digit_counts",
    "double_in_place",
    "expand",
    "from_exponent",
    "from_integer",
    "leading_counts",
    "leading_value",
    "length_formula",
    "length_sums",
    "limit_average_count",
    "merge",
    "per_exponent_record",
    "predicted_leading_digit",
    "recurrence_gap",
    "run_sweep",
    "scan_range",
    "sigma_aggregate",
    "sigma_aggregate_approx",
    "sigma_single",
    "verify_prefix",
    "zero_run_after_leading",
]
