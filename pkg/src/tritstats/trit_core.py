"""Exact base-3 representations of large nonnegative integers.

The working object is :class:`TernaryNumber`, a mutable digit buffer holding
trits least-significant first.  The only arithmetic it supports is doubling,
which is all a power-of-two scan needs; everything else is conversion.

Conversions to and from binary integers go through gmpy2 (GMP's
divide-and-conquer radix conversion), so building 2**n directly and doubling
2**(n-1) are genuinely independent routes to the same digit string.
"""

from __future__ import annotations

from typing import Iterable, Union

import gmpy2
import numpy as np

Trit = int  # a digit value in {0, 1, 2}

# (2*d + carry_in) mod 3 for d in 0..2, carry_in in 0..1
_DOUBLE_LUT = np.array([0, 1, 2, 0, 1, 2], dtype=np.uint8)

_ZERO = ord("0")


class TernaryNumber:
    """Base-3 digits of a nonnegative integer, least-significant trit first.

    Invariants: every stored trit is 0, 1, or 2; the most significant trit is
    nonzero; the integer zero is the empty digit sequence.  Instances are
    mutable (see :func:`double_in_place`) and therefore unhashable.
    """

    __slots__ = ("_buf", "_len")

    def __init__(self, trits: Union[Iterable[int], np.ndarray] = ()) -> None:
        if not isinstance(trits, np.ndarray):
            trits = list(trits)
        arr = np.asarray(trits)
        if arr.dtype.kind not in "iu":
            arr = np.asarray([int(t) for t in trits], dtype=np.int64)
        if arr.ndim != 1:
            raise ValueError("trits must be a one-dimensional sequence")
        if arr.size:
            if int(arr.min()) < 0 or int(arr.max()) > 2:
                raise ValueError("trit values must be 0, 1, or 2")
            if int(arr[-1]) == 0:
                raise ValueError("most significant trit must be nonzero")
        self._buf = arr.astype(np.uint8)
        self._len = int(arr.size)

    # -- construction -----------------------------------------------------

    @classmethod
    def from_trits(cls, trits: Union[Iterable[int], np.ndarray]) -> "TernaryNumber":
        """Build from least-significant-first digit values."""
        return cls(trits)

    # -- accessors ---------------------------------------------------------

    @property
    def length(self) -> int:
        """Number of trits (0 for the integer zero)."""
        return self._len

    @property
    def digits(self) -> np.ndarray:
        """Read-only view of the trits, least significant first."""
        view = self._buf[: self._len].view()
        view.flags.writeable = False
        return view

    def digit(self, i: int) -> Trit:
        """Trit at position i (value contribution 3**i)."""
        if not 0 <= i < self._len:
            raise IndexError("trit index out of range")
        return int(self._buf[i])

    @property
    def leading_digit(self) -> Trit:
        """Most significant trit."""
        if self._len == 0:
            raise ValueError("zero has no leading digit")
        return int(self._buf[self._len - 1])

    def digit_string(self) -> str:
        """Digits as text, most significant first; zero is the empty string."""
        if self._len == 0:
            return ""
        rev = self._buf[self._len - 1 :: -1] + np.uint8(_ZERO)
        return rev.tobytes().decode("ascii")

    def to_int(self) -> int:
        """The represented integer."""
        if self._len == 0:
            return 0
        return int(gmpy2.mpz(self.digit_string(), 3))

    def copy(self) -> "TernaryNumber":
        out = TernaryNumber.__new__(TernaryNumber)
        out._buf = self._buf[: self._len].copy()
        out._len = self._len
        return out

    # -- dunder ------------------------------------------------------------

    def __len__(self) -> int:
        return self._len

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TernaryNumber):
            return NotImplemented
        return self._len == other._len and bool(
            np.array_equal(self._buf[: self._len], other._buf[: other._len])
        )

    __hash__ = None  # mutable

    def __repr__(self) -> str:
        s = self.digit_string()
        if len(s) > 24:
            s = s[:12] + "..." + s[-9:]
        return f"TernaryNumber({s!r}, length={self._len})"

    # -- internal ----------------------------------------------------------

    def _ensure_capacity(self, need: int) -> None:
        if self._buf.shape[0] < need:
            grown = np.zeros(max(need, 2 * self._buf.shape[0], 16), dtype=np.uint8)
            grown[: self._len] = self._buf[: self._len]
            self._buf = grown


def _from_mpz(z: "gmpy2.mpz") -> TernaryNumber:
    out = TernaryNumber.__new__(TernaryNumber)
    if z == 0:
        out._buf = np.zeros(0, dtype=np.uint8)
        out._len = 0
        return out
    s = z.digits(3)
    msb = np.frombuffer(s.encode("ascii"), dtype=np.uint8)
    out._buf = msb[::-1] - np.uint8(_ZERO)
    out._len = out._buf.shape[0]
    return out


def from_integer(value: int) -> TernaryNumber:
    """Exact base-3 digits of a nonnegative integer."""
    if value < 0:
        raise ValueError("value must be nonnegative")
    return _from_mpz(gmpy2.mpz(value))


def from_exponent(n: int) -> TernaryNumber:
    """Exact base-3 digits of 2**n."""
    if n < 0:
        raise ValueError("exponent must be nonnegative")
    return _from_mpz(gmpy2.mpz(1) << n)


def double_in_place(x: TernaryNumber) -> TernaryNumber:
    """Replace x with 2*x, reusing the digit buffer.  Returns x.

    Doubling a trit yields carry 1 exactly when the nearest non-propagating
    trit at or below it is a 2: a 2 generates a carry, a 0 kills it, and a 1
    (2*1+1 = 10_3) merely passes the decision down.  A forward max-scan over
    "index of last non-1 trit" resolves every carry in one vector pass.
    """
    n = x._len
    if n == 0:
        return x
    d = x._buf[:n]
    gen = d == 2
    idx = np.where(d == 1, -1, np.arange(n))
    np.maximum.accumulate(idx, out=idx)
    carry = np.where(idx >= 0, gen[np.maximum(idx, 0)], False)
    total = 2 * d
    total[1:] += carry[:-1]
    grew = bool(carry[-1])
    x._ensure_capacity(n + 1)
    x._buf[:n] = _DOUBLE_LUT[total]
    if grew:
        x._buf[n] = 1
        x._len = n + 1
    return x
