"""Digit statistics of a single ternary number.

Counts are exact Python integers.  Block parsing is non-overlapping and
anchored at the most significant digit; a trailing remainder shorter than the
block length is discarded.  Leading-digit tallies look at the top H+1 digits,
or all of them when the number is shorter than that.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterable, Mapping

import gmpy2
import numpy as np

from .trit_core import TernaryNumber, Trit

# bincount over 3**k codes stays cheap only for modest k
MAX_BLOCK_LENGTH = 12


@lru_cache(maxsize=None)
def block_strings(k: int) -> tuple[str, ...]:
    """All length-k digit strings in lexicographic order."""
    return tuple("".join(p) for p in product("012", repeat=k))


@dataclass(frozen=True)
class DigitTally:
    """Counts of the digits 0, 1, 2."""

    counts: tuple[int, int, int]

    @property
    def total(self) -> int:
        return self.counts[0] + self.counts[1] + self.counts[2]

    def __getitem__(self, d: Trit) -> int:
        if d not in (0, 1, 2):
            raise ValueError("digit must be 0, 1, or 2")
        return self.counts[d]


@dataclass(frozen=True)
class BlockTally:
    """Counts of length-k digit blocks; only observed blocks are listed."""

    k: int
    counts: Mapping[str, int]
    blocks_total: int  # number of parsed blocks, floor(length / k)


@dataclass(frozen=True)
class PerExponentRecord:
    """Everything the aggregator needs from one number in a scan."""

    n: int
    length: int
    digits: DigitTally
    blocks: Mapping[int, BlockTally]
    leading: Mapping[int, DigitTally]
    zero_run: int
    leading_digit: Trit


def digit_counts(x: TernaryNumber) -> DigitTally:
    """Exact counts of each digit value in x."""
    c = np.bincount(x.digits, minlength=3)
    return DigitTally((int(c[0]), int(c[1]), int(c[2])))


def _block_codes(x: TernaryNumber, k: int) -> tuple[np.ndarray, int]:
    ell = x.length
    nb = ell // k
    if nb == 0:
        return np.zeros(0, dtype=np.int64), 0
    d = x.digits
    codes = np.zeros(nb, dtype=np.int64)
    # j-th digit of every block, via one strided slice per in-block position
    for j in range(k):
        codes *= 3
        codes += d[ell - 1 - j :: -k][:nb]
    return codes, nb


def block_counts(x: TernaryNumber, k: int) -> BlockTally:
    """Non-overlapping block counts, parsed from the most significant digit."""
    if k < 1:
        raise ValueError("block length must be at least 1")
    if k > MAX_BLOCK_LENGTH:
        raise ValueError(f"block length above {MAX_BLOCK_LENGTH} not supported")
    codes, nb = _block_codes(x, k)
    if nb == 0:
        return BlockTally(k, {}, 0)
    tally = np.bincount(codes, minlength=3**k)
    keys = block_strings(k)
    counts = {keys[c]: int(v) for c, v in enumerate(tally) if v}
    return BlockTally(k, counts, nb)


def leading_counts(x: TernaryNumber, depth: int) -> DigitTally:
    """Digit counts over the top depth+1 digits (all digits when shorter)."""
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    ell = x.length
    take = min(depth + 1, ell)
    c = np.bincount(x.digits[ell - take :], minlength=3)
    return DigitTally((int(c[0]), int(c[1]), int(c[2])))


def leading_value(x: TernaryNumber, j: int) -> int:
    """Integer value of the top j digits read as a base-3 numeral."""
    if not 1 <= j <= x.length:
        raise ValueError("j must be between 1 and the digit count")
    return int(gmpy2.mpz(x.digit_string()[:j], 3))


def zero_run_after_leading(x: TernaryNumber) -> int:
    """Number of consecutive zeros immediately after the leading digit."""
    ell = x.length
    if ell == 0:
        raise ValueError("zero has no leading digit")
    d = x.digits
    run = 0
    i = ell - 2
    while i >= 0 and d[i] == 0:
        run += 1
        i -= 1
    return run


def contains_digit(x: TernaryNumber, d: Trit) -> bool:
    """Whether digit value d occurs anywhere in x."""
    if d not in (0, 1, 2):
        raise ValueError("digit must be 0, 1, or 2")
    return bool(np.any(x.digits == d))


def per_exponent_record(
    n: int,
    x: TernaryNumber,
    block_lengths: Iterable[int] = (2, 3),
    leading_depths: Iterable[int] = (0, 1, 2, 3),
) -> PerExponentRecord:
    """Assemble every per-number tally an aggregate scan keeps for 2**n."""
    return PerExponentRecord(
        n=n,
        length=x.length,
        digits=digit_counts(x),
        blocks={k: block_counts(x, k) for k in block_lengths},
        leading={h: leading_counts(x, h) for h in leading_depths},
        zero_run=zero_run_after_leading(x),
        leading_digit=x.leading_digit,
    )
