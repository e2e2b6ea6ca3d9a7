"""Closed-form reference values for the digit scans.

Exact integer facts (digit counts of 2**n, floor(n*alpha)) are derived from a
certified fixed-point value of alpha = log_3(2) via interval arithmetic: the
true value is bracketed by value +/- err_ulps, and any quantity is accepted
only when both interval ends agree on it.  If they ever disagree the module
transparently rebuilds alpha at twice the precision and retries, so results
never silently depend on a precision choice.

Real-valued reference quantities (Benford probabilities, limiting average
leading-digit counts, sigma benchmarks) are evaluated with mpmath at a fixed
30-significant-digit working precision, far beyond the 12 decimals any report
prints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from mpmath import mp

from . import alpha as alpha_mod
from . import stats
from .trit_core import from_integer

WORKING_DPS = 30
MAX_LIMIT_DEPTH = 12  # the depth-H enumeration walks 2 * 3**H integers
_DEFAULT_FRAC_BITS = 192


@dataclass(frozen=True)
class AlphaFixedPoint:
    """Certified scaled integer: |value / 2**frac_bits - alpha| <= err_ulps ulp."""

    value: int
    frac_bits: int
    err_ulps: int


_fixed_state: AlphaFixedPoint | None = None


def alpha_fixed_point() -> AlphaFixedPoint:
    """The module's current certified alpha approximation."""
    global _fixed_state
    if _fixed_state is None:
        value, err = alpha_mod.fixed_point(_DEFAULT_FRAC_BITS)
        _fixed_state = AlphaFixedPoint(value, _DEFAULT_FRAC_BITS, err)
    return _fixed_state


def _escalate() -> None:
    global _fixed_state
    frac_bits = alpha_fixed_point().frac_bits * 2
    value, err = alpha_mod.fixed_point(frac_bits)
    _fixed_state = AlphaFixedPoint(value, frac_bits, err)


def _floor_alpha_multiple(n: int) -> int:
    """floor(n * alpha), certified by the +/- err_ulps interval."""
    while True:
        fp = alpha_fixed_point()
        low = (n * (fp.value - fp.err_ulps)) >> fp.frac_bits
        high = (n * (fp.value + fp.err_ulps)) >> fp.frac_bits
        if low == high:
            return low
        _escalate()


def length_formula(n: int) -> int:
    """Number of ternary digits of 2**n: floor(n * alpha) + 1."""
    if n < 0:
        raise ValueError("exponent must be nonnegative")
    if n == 0:
        return 1
    return _floor_alpha_multiple(n) + 1


def length_sums(max_n: int) -> tuple[int, int, int]:
    """Exact (sum of lengths, sum of length//2, sum of length//3) for n <= max_n.

    These are the digit and block denominators of a sweep up to max_n,
    computed without touching any digits: the length of 2**n is
    floor(n*alpha) + 1.  Runs in O(max_n) big-int additions.
    """
    if max_n < 1:
        raise ValueError("max_n must be at least 1")
    while True:
        fp = alpha_fixed_point()
        v_low = fp.value - fp.err_ulps
        v_high = fp.value + fp.err_ulps
        frac_bits = fp.frac_bits
        acc_low = 0
        acc_high = 0
        total = half = third = 0
        ok = True
        for _ in range(max_n):
            acc_low += v_low
            acc_high += v_high
            floor_mult = acc_low >> frac_bits
            if floor_mult != acc_high >> frac_bits:
                ok = False
                break
            ell = floor_mult + 1
            total += ell
            half += ell >> 1
            third += ell // 3
        if ok:
            return total, half, third
        _escalate()


def predicted_leading_digit(n: int) -> int:
    """Leading ternary digit of 2**n from the three-distance structure.

    With k = floor(n*alpha), the digit is 1 exactly when (n-1)*alpha < k,
    else 2 (digit 0 would need 2**n < 3**k, impossible).  Certified via the
    same interval escalation as the floor itself.
    """
    if n < 0:
        raise ValueError("exponent must be nonnegative")
    if n == 0:
        return 1
    while True:
        fp = alpha_fixed_point()
        low = (n * (fp.value - fp.err_ulps)) >> fp.frac_bits
        high = (n * (fp.value + fp.err_ulps)) >> fp.frac_bits
        if low == high:
            threshold = low << fp.frac_bits
            prev_low = (n - 1) * (fp.value - fp.err_ulps)
            prev_high = (n - 1) * (fp.value + fp.err_ulps)
            if prev_high < threshold:
                return 1
            if prev_low >= threshold:
                return 2
        _escalate()


# -- limiting leading-digit averages ---------------------------------------


@lru_cache(maxsize=None)
def _ln3():
    with mp.workdps(WORKING_DPS):
        return mp.log(3)


def benford_probability(m: int):
    """Base-3 Benford mass of the leading numeral m: log3(m+1) - log3(m)."""
    if m < 1:
        raise ValueError("numeral must be at least 1")
    with mp.workdps(WORKING_DPS):
        return (mp.log(m + 1) - mp.log(m)) / _ln3()


@lru_cache(maxsize=None)
def _limit_row(depth: int) -> tuple:
    """(L_0, L_1, L_2) at this depth, plus the matching second moments.

    L_d(depth) = sum over numerals m with depth+1 digits of
    gamma_d(m, depth) * P(m), where gamma counts digit d in m and P is the
    base-3 Benford mass.  Returns ((L_0, L_1, L_2), (S_0, S_1, S_2)) with
    S_d = sum gamma_d**2 * P(m).
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    if depth > MAX_LIMIT_DEPTH:
        raise ValueError(f"depth above {MAX_LIMIT_DEPTH} exceeds the enumeration budget")
    with mp.workdps(WORKING_DPS):
        ln3 = _ln3()
        first = mp.zero
        second = mp.zero
        third = mp.zero
        sq = [mp.zero, mp.zero, mp.zero]
        prev_log = mp.log(3**depth)
        for m in range(3**depth, 3 ** (depth + 1)):
            next_log = mp.log(m + 1)
            mass = (next_log - prev_log) / ln3
            prev_log = next_log
            gamma = stats.leading_counts(from_integer(m), depth).counts
            first += gamma[0] * mass
            second += gamma[1] * mass
            third += gamma[2] * mass
            for d in (0, 1, 2):
                sq[d] += gamma[d] * gamma[d] * mass
        return (first, second, third), tuple(sq)


def limit_average_count(d: int, depth: int):
    """Limiting average count of digit d among the top depth+1 digits."""
    if d not in (0, 1, 2):
        raise ValueError("digit must be 0, 1, or 2")
    return _limit_row(depth)[0][d]


def limit_average_variance(d: int, depth: int):
    """Benford-weighted variance of the depth-H leading count of digit d."""
    if d not in (0, 1, 2):
        raise ValueError("digit must be 0, 1, or 2")
    means, seconds = _limit_row(depth)
    with mp.workdps(WORKING_DPS):
        return seconds[d] - means[d] ** 2


def recurrence_gap(d: int, depth: int):
    """L_d(depth+1) - L_d(depth) - 1/3: the defect of one-deeper recursion."""
    if d not in (0, 1, 2):
        raise ValueError("digit must be 0, 1, or 2")
    with mp.workdps(WORKING_DPS):
        return (
            _limit_row(depth + 1)[0][d]
            - _limit_row(depth)[0][d]
            - mp.mpf(1) / 3
        )


# -- sigma benchmarks --------------------------------------------------------


@lru_cache(maxsize=None)
def _alpha_float() -> float:
    with mp.workdps(WORKING_DPS):
        return float(mp.log(2) / mp.log(3))


def sigma_aggregate(kind: str, total: int) -> float:
    """i.i.d. benchmark sigma for an aggregate frequency.

    kind is 'digit' or 'block-<k>'; total is the matching denominator (total
    digit count, or total parsed block count).
    """
    if kind == "digit":
        k = 1
    elif kind.startswith("block-"):
        k = int(kind[len("block-"):])
        if k < 1:
            raise ValueError("block length must be at least 1")
    else:
        raise ValueError(f"unknown sigma kind: {kind!r}")
    if total < 1:
        raise ValueError("total must be positive")
    p = 3.0**-k
    return math.sqrt(p * (1.0 - p) / total)


def sigma_aggregate_approx(max_n: int) -> float:
    """Closed-form stand-in for sigma_aggregate('digit', L(max_n)).

    Uses L(N) ~ alpha N(N+1)/2 in the binomial variance, giving
    sqrt(4 / (9 alpha N (N+1))); no digit or length scan needed.
    """
    if max_n < 1:
        raise ValueError("max_n must be at least 1")
    return math.sqrt(4.0 / (9.0 * _alpha_float() * max_n * (max_n + 1)))


def sigma_single(n: int) -> float:
    """i.i.d. benchmark sigma for the digit frequencies of a single 2**n."""
    if n < 0:
        raise ValueError("exponent must be nonnegative")
    return math.sqrt(2.0 / (9.0 * length_formula(n)))


# -- assembled reference table -----------------------------------------------


@dataclass(frozen=True)
class SigmaBenchmarks:
    """Benchmark sigmas for a sweep up to max_n, exact denominators included.

    Block sigmas are None when the range is so short that no block of that
    length fits (a zero denominator has no benchmark).
    """

    max_n: int
    total_digits: int
    total_blocks2: int
    total_blocks3: int
    sigma_digit: float
    sigma_block2: float | None
    sigma_block3: float | None
    sigma_digit_approx: float


@dataclass(frozen=True)
class TheoryTable:
    """Everything the theory report prints."""

    max_depth: int
    limits: dict  # (depth, digit) -> mpf
    gaps: dict  # (depth, digit) -> mpf, depth < max_depth
    benford: dict  # numeral -> mpf
    sigma: tuple


def sigma_benchmarks(max_n: int) -> SigmaBenchmarks:
    total, half, third = length_sums(max_n)
    return SigmaBenchmarks(
        max_n=max_n,
        total_digits=total,
        total_blocks2=half,
        total_blocks3=third,
        sigma_digit=sigma_aggregate("digit", total),
        sigma_block2=sigma_aggregate("block-2", half) if half else None,
        sigma_block3=sigma_aggregate("block-3", third) if third else None,
        sigma_digit_approx=sigma_aggregate_approx(max_n),
    )


def build_theory_table(
    max_depth: int = 8,
    benford_max: int = 8,
    sigma_exponents: tuple[int, ...] = (),
) -> TheoryTable:
    if max_depth < 0 or max_depth > MAX_LIMIT_DEPTH:
        raise ValueError(f"max_depth must be in 0..{MAX_LIMIT_DEPTH}")
    if benford_max < 1:
        raise ValueError("benford_max must be at least 1")
    limits = {}
    gaps = {}
    for depth in range(max_depth + 1):
        for d in (0, 1, 2):
            limits[(depth, d)] = limit_average_count(d, depth)
    for depth in range(max_depth):
        for d in (0, 1, 2):
            gaps[(depth, d)] = recurrence_gap(d, depth)
    benford = {m: benford_probability(m) for m in range(1, benford_max + 1)}
    sigma = tuple(sigma_benchmarks(n) for n in sigma_exponents)
    return TheoryTable(
        max_depth=max_depth, limits=limits, gaps=gaps, benford=benford, sigma=sigma
    )
