"""Stdlib-only reference implementations used as test oracles.

Everything here deliberately avoids the package's dependencies: base-3
strings come from repeated divmod, tallies from str.count and slicing, and
decimal rendering from the decimal module.  Slow but obviously correct.
"""

from __future__ import annotations

import decimal
from fractions import Fraction


def to_base3(value: int) -> str:
    """Base-3 numeral of a nonnegative int; empty string for zero."""
    if value < 0:
        raise ValueError("nonnegative only")
    if value == 0:
        return ""
    digits = []
    while value:
        value, r = divmod(value, 3)
        digits.append(str(r))
    return "".join(reversed(digits))


def digit_counts(s: str) -> tuple[int, int, int]:
    return (s.count("0"), s.count("1"), s.count("2"))


def block_counts(s: str, k: int) -> tuple[dict[str, int], int]:
    """Non-overlapping blocks from the front (most significant digit)."""
    nb = len(s) // k
    out: dict[str, int] = {}
    for i in range(nb):
        block = s[i * k : (i + 1) * k]
        out[block] = out.get(block, 0) + 1
    return out, nb


def leading_counts(s: str, depth: int) -> tuple[int, int, int]:
    return digit_counts(s[: depth + 1])


def leading_value(s: str, j: int) -> int:
    return int(s[:j], 3)


def zero_run(s: str) -> int:
    run = 0
    for ch in s[1:]:
        if ch != "0":
            break
        run += 1
    return run


def format_decimal(fr: Fraction, places: int) -> str:
    """Fixed-point rendering with banker's rounding via the decimal module."""
    with decimal.localcontext() as ctx:
        ctx.prec = 60
        d = decimal.Decimal(fr.numerator) / decimal.Decimal(fr.denominator)
        quantum = decimal.Decimal(1).scaleb(-places)
        return f"{d.quantize(quantum, rounding=decimal.ROUND_HALF_EVEN):f}"


def format_percent(fr: Fraction, places: int = 6) -> str:
    return format_decimal(fr * 100, places)


class SweepTotals:
    """Pure-int replica of an aggregate scan over n = 1..max_n."""

    def __init__(self, max_n: int, ks=(2, 3), hs=(0, 1, 2, 3)):
        self.max_n = max_n
        self.ks = ks
        self.hs = hs
        self.total_digits = 0
        self.digit_totals = [0, 0, 0]
        self.block_totals = {k: 0 for k in ks}
        self.block_tables: dict[int, dict[str, int]] = {k: {} for k in ks}
        self.leading_totals = {h: [0, 0, 0] for h in hs}
        self.per_n: list[dict] = []
        value = 1
        for n in range(1, max_n + 1):
            value *= 2
            s = to_base3(value)
            counts = digit_counts(s)
            self.total_digits += len(s)
            for d in (0, 1, 2):
                self.digit_totals[d] += counts[d]
            for k in ks:
                table, nb = block_counts(s, k)
                self.block_totals[k] += nb
                sink = self.block_tables[k]
                for block, c in table.items():
                    sink[block] = sink.get(block, 0) + c
            for h in hs:
                top = leading_counts(s, h)
                for d in (0, 1, 2):
                    self.leading_totals[h][d] += top[d]
            self.per_n.append({
                "n": n,
                "length": len(s),
                "counts": counts,
                "zero_run": zero_run(s),
                "leading_digit": int(s[0]),
            })

    def digit_frequency(self, d: int) -> Fraction:
        return Fraction(self.digit_totals[d], self.total_digits)

    def block_frequency(self, block: str) -> Fraction:
        k = len(block)
        return Fraction(self.block_tables[k].get(block, 0), self.block_totals[k])

    def leading_average(self, d: int, h: int) -> Fraction:
        return Fraction(self.leading_totals[h][d], self.max_n)
