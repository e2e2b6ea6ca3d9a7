"""Certified ternary expansion of alpha = log_3(2).

alpha is irrational, so the expansion 0.d1 d2 d3 ... never terminates or
repeats; every run here computes a finite prefix together with evidence that
it is exact:

* two independent evaluations, carried out with `guard` and `2*guard` extra
  digits of working precision, must agree on the requested prefix
  (certification by recomputation), and
* short prefixes can be checked against the defining inequality
  3**A <= 2**(3**D) < 3**(A+1) with A the prefix value, which uses nothing
  but exact integer powers (certification by oracle).

The logarithms come from a Machin-style pair: with u = acoth(7) and
v = acoth(17), ln 2 = 4u + 2v and ln 3 = 6u + 4v, hence
alpha = (2u + v)/(3u + 2v) costs two fast-converging series and one
division.  Each series is summed by binary splitting in scaled-integer
arithmetic, so nothing here depends on floating point.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import gmpy2
import numpy as np
from gmpy2 import mpz

from . import stats
from .stats import BlockTally, DigitTally
from .trit_core import TernaryNumber

GUARD_MIN = 8
DEFAULT_GUARD = 64

# largest prefix the exact power-inequality oracle is willing to check:
# the witness 2**(3**D) has about 0.63 * 3**D trits, so growth is steep
ORACLE_MAX_DIGITS = 12

_LOG2_3 = math.log(3, 2)
_FILE_HEADER = re.compile(r"^ALPHA3 v1 D=(\d+) certified=(true|false)$")


@dataclass(frozen=True)
class AlphaExpansion:
    """A prefix of the ternary expansion of alpha.

    ``digits`` holds d1..dD most significant first (d1 is the first
    fractional digit; there is no integer part since 0 < alpha < 1).
    ``certified`` records that two runs at different guard widths agreed.
    """

    digit_count: int
    digits: np.ndarray
    guard: int
    certified: bool

    def digit_string(self) -> str:
        return (self.digits + np.uint8(ord("0"))).tobytes().decode("ascii")

    def prefix_value(self, j: int | None = None) -> int:
        """Integer value of the first j digits (default: all of them)."""
        if j is None:
            j = self.digit_count
        if not 1 <= j <= self.digit_count:
            raise ValueError("prefix length out of range")
        return int(gmpy2.mpz(self.digit_string()[:j], 3))


def _acoth_fixed(x: int, bits: int) -> int:
    """floor-ish acoth(x) * 2**bits via binary splitting; error < 2 ulp.

    acoth(x) = sum_{i>=0} 1 / ((2i+1) * x**(2i+1)).  The split keeps the
    partial sum as P/(Q*x) with the x**2 powers folded into Q.
    """
    if x < 2:
        raise ValueError("series needs x >= 2")
    xsq = mpz(x * x)
    nterms = max(2, int(bits * math.log(2) / (2 * math.log(x))) + 2)

    def split(a: int, b: int) -> tuple[mpz, mpz, mpz]:
        # returns (P, Q, R) with sum_{i=a}^{b-1} term_i = P / (Q * x)
        # and R = xsq**(b-a) to stitch ranges together
        if b - a == 1:
            return mpz(1), mpz(2 * a + 1), xsq
        mid = (a + b) // 2
        p1, q1, r1 = split(a, mid)
        p2, q2, r2 = split(mid, b)
        return p1 * q2 * r1 + p2 * q1, q1 * q2 * r1, r1 * r2

    p, q, _ = split(0, nterms)
    return int((p << bits) // (q * x))


def _alpha_scaled(bits: int) -> int:
    """alpha * 2**bits rounded down, within 2 ulp."""
    work = bits + 64
    u = _acoth_fixed(7, work)
    v = _acoth_fixed(17, work)
    return int(((2 * u + v) << bits) // (3 * u + 2 * v))


_oracle_prefix_cache: dict[int, int] = {}


def _oracle_prefix_value(digit_count: int) -> int:
    """Exact floor(3**D * alpha) for small D, straight from the definition.

    floor(3**D * alpha) = A iff 3**A <= 2**(3**D) < 3**(A+1); A is found by
    sizing the exact power 2**(3**D) in base 3.
    """
    if digit_count in _oracle_prefix_cache:
        return _oracle_prefix_cache[digit_count]
    if not 1 <= digit_count <= ORACLE_MAX_DIGITS:
        raise ValueError(f"oracle budget is 1..{ORACLE_MAX_DIGITS} digits")
    power = mpz(1) << (3**digit_count)
    a = power.num_digits(3) - 1  # num_digits may overshoot by one for base 3
    if mpz(3) ** a > power:
        a -= 1
    assert mpz(3) ** a <= power < mpz(3) ** (a + 1)
    _oracle_prefix_cache[digit_count] = a
    return a


def fixed_point(frac_bits: int) -> tuple[int, int]:
    """(value, err_ulps) with |value/2**frac_bits - alpha| <= err_ulps ulp.

    Two evaluations at different working precisions must agree to within one
    ulp, and the top ternary digits implied by the value are checked against
    the exact oracle.
    """
    if frac_bits < 48:
        raise ValueError("frac_bits below 48 is not useful here")
    first = _alpha_scaled(frac_bits)
    work = frac_bits + 128
    u = _acoth_fixed(7, work)
    v = _acoth_fixed(17, work)
    second = int(((2 * u + v) << frac_bits) // (3 * u + 2 * v))
    if abs(first - second) > 1:
        raise ArithmeticError("alpha fixed-point runs disagree")
    value = second
    check_d = 12
    implied = (value * mpz(3) ** check_d) >> frac_bits
    if abs(int(implied) - _oracle_prefix_value(check_d)) > 1:
        raise ArithmeticError("alpha fixed-point value fails the exact oracle")
    return value, 2


def _expansion_digits(digit_count: int, guard: int) -> np.ndarray:
    """One uncertified run: first `digit_count` ternary digits of alpha."""
    total = digit_count + guard
    bits = int(total * _LOG2_3) + 64
    scaled = _alpha_scaled(bits)
    shifted = (mpz(3) ** total * scaled) >> bits
    s = shifted.digits(3)
    # alpha > 1/3, so d1 is nonzero and the numeral has exactly `total` digits
    if len(s) != total:
        raise ArithmeticError("unexpected expansion length; guard too small")
    msb = np.frombuffer(s.encode("ascii"), dtype=np.uint8) - np.uint8(ord("0"))
    return msb[:digit_count].copy()


def expand(digit_count: int, guard: int = DEFAULT_GUARD) -> AlphaExpansion:
    """Compute d1..dD, certified by agreement of guard and 2*guard runs."""
    if digit_count < 1:
        raise ValueError("digit_count must be at least 1")
    if guard < GUARD_MIN:
        raise ValueError(f"guard must be at least {GUARD_MIN}")
    run = _expansion_digits(digit_count, guard)
    wide = _expansion_digits(digit_count, 2 * guard)
    certified = bool(np.array_equal(run, wide))
    digits = wide if certified else run
    digits.flags.writeable = False
    return AlphaExpansion(
        digit_count=digit_count, digits=digits, guard=guard, certified=certified
    )


def verify_prefix(expansion: AlphaExpansion, digit_count: int,
                  budget: int = ORACLE_MAX_DIGITS) -> bool:
    """Exact check of the first digits against the defining inequality."""
    if not 1 <= digit_count <= expansion.digit_count:
        raise ValueError("digit_count exceeds the expansion")
    if digit_count > budget:
        raise ValueError(f"digit_count exceeds the oracle budget ({budget})")
    return expansion.prefix_value(digit_count) == _oracle_prefix_value(digit_count)


def digit_statistics(
    expansion: AlphaExpansion, block_lengths: tuple[int, ...] = (2, 3)
) -> tuple[DigitTally, dict[int, BlockTally]]:
    """Digit and block tallies of a certified expansion prefix."""
    if not expansion.certified:
        raise ValueError("refusing statistics of an uncertified expansion")
    x = TernaryNumber.from_trits(expansion.digits[::-1])
    return stats.digit_counts(x), {k: stats.block_counts(x, k) for k in block_lengths}


def save_expansion(path, expansion: AlphaExpansion) -> None:
    """Write the digit file: a one-line header, then the digits."""
    cert = "true" if expansion.certified else "false"
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"ALPHA3 v1 D={expansion.digit_count} certified={cert}\n")
        fh.write(expansion.digit_string())
        fh.write("\n")


def load_expansion(path) -> AlphaExpansion:
    """Read a digit file written by :func:`save_expansion`."""
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().rstrip("\n")
        body = fh.readline().rstrip("\n")
        trailer = fh.read()
    m = _FILE_HEADER.match(header)
    if m is None:
        raise ValueError(f"not an ALPHA3 v1 digit file: {header!r}")
    if trailer.strip():
        raise ValueError("unexpected content after the digit line")
    digit_count = int(m.group(1))
    certified = m.group(2) == "true"
    if len(body) != digit_count:
        raise ValueError("digit line does not match the declared digit count")
    msb = np.frombuffer(body.encode("ascii"), dtype=np.uint8) - np.uint8(ord("0"))
    if msb.size and int(msb.max()) > 2:
        raise ValueError("digit line contains non-ternary characters")
    msb.flags.writeable = False
    return AlphaExpansion(
        digit_count=digit_count, digits=msb, guard=0, certified=certified
    )
