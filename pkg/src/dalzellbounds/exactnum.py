"""Exact rationals, certified enclosures of pi and ln 2, and decimal rendering.

Every quantity in the library is a :class:`fractions.Fraction`. The two
transcendental constants enter only through :class:`ConstantEnclosure`, a
rational interval proven to contain the constant; no floating point is used
anywhere on a certification path.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Protocol

ExactRational = Fraction

__all__ = [
    "ExactRational",
    "Constant",
    "ConstantEnclosure",
    "DecimalString",
    "AffineValue",
    "Sign",
    "to_decimal",
    "parse_decimal",
    "pi_enclosure",
    "ln2_enclosure",
    "sign_of_affine_combination",
    "certified_sign",
    "affine_interval",
    "evaluate_affine",
    "format_rational",
    "MAX_SIGN_RETRIES",
]

MAX_SIGN_RETRIES = 5


class Constant(enum.Enum):
    PI = "pi"
    LN2 = "ln2"


class DecimalString(str):
    """A fixed-point decimal rendering such as ``"0.024938258665"``."""

    @property
    def text(self) -> str:
        return str(self)

    @property
    def digits(self) -> int:
        _, _, frac = self.partition(".")
        return len(frac)


def to_decimal(x: Fraction, digits: int) -> DecimalString:
    """Round ``x`` to ``digits`` fractional digits, ties away from zero.

    >>> to_decimal(Fraction(1, 38), 12)
    '0.026315789474'
    """
    if digits < 1:
        raise ValueError("digits must be >= 1")
    x = Fraction(x)
    scale = 10**digits
    num = abs(x.numerator) * scale
    den = x.denominator
    q, r = divmod(num, den)
    if 2 * r >= den:
        q += 1
    sign = "-" if x < 0 and q else ""
    whole, frac = divmod(q, scale)
    return DecimalString(f"{sign}{whole}.{frac:0{digits}d}")


def parse_decimal(text: str) -> Fraction:
    return Fraction(text)


def format_rational(x: Fraction) -> str:
    """``p/q`` with the denominator always present (``1/1`` for one)."""
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class ConstantEnclosure:
    """Rational interval ``(lo, hi)`` strictly containing ``target``."""

    target: Constant
    lo: Fraction
    hi: Fraction
    requested_precision: int

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("empty enclosure")
        if self.hi - self.lo >= Fraction(1, 10**self.requested_precision):
            raise ValueError("enclosure wider than requested precision")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x: Fraction) -> bool:
        return self.lo < x < self.hi

    def scaled(self, factor: Fraction) -> tuple[Fraction, Fraction]:
        """Interval of ``factor * target`` as a ``(lo, hi)`` pair."""
        a, b = factor * self.lo, factor * self.hi
        return (a, b) if a <= b else (b, a)


def _outward(lo: Fraction, hi: Fraction, guard_digits: int) -> tuple[Fraction, Fraction]:
    # Snap to a decimal grid so downstream denominators stay small.
    g = 10**guard_digits
    lo_n = math.floor(lo * g)
    hi_n = math.ceil(hi * g)
    return Fraction(lo_n, g), Fraction(hi_n, g)


def _arctan_inverse(x: int, tol: Fraction) -> tuple[Fraction, Fraction]:
    """Sum of arctan(1/x) and the magnitude of the first omitted term (< tol)."""
    total = Fraction(0)
    i = 0
    while True:
        term = Fraction(1, (2 * i + 1) * x ** (2 * i + 1))
        if term < tol:
            return total, term
        total += term if i % 2 == 0 else -term
        i += 1


@lru_cache(maxsize=64)
def pi_enclosure(digits: int) -> ConstantEnclosure:
    """Enclose pi with Machin's formula ``pi = 16 atan(1/5) - 4 atan(1/239)``."""
    if digits < 1:
        raise ValueError("digits must be >= 1")
    # Total half-width 16*t5 + 4*t239 is kept below 10^-(digits+2) / 2.
    tol = Fraction(1, 40 * 10 ** (digits + 2))
    s5, t5 = _arctan_inverse(5, tol)
    s239, t239 = _arctan_inverse(239, tol)
    lo = 16 * (s5 - t5) - 4 * (s239 + t239)
    hi = 16 * (s5 + t5) - 4 * (s239 - t239)
    lo, hi = _outward(lo, hi, digits + 4)
    return ConstantEnclosure(Constant.PI, lo, hi, digits)


@lru_cache(maxsize=64)
def ln2_enclosure(digits: int) -> ConstantEnclosure:
    """Enclose ln 2 with ``sum 1/(i 2^i)``; the tail after N terms is below 1/(N 2^N)."""
    if digits < 1:
        raise ValueError("digits must be >= 1")
    target_tail = Fraction(1, 10 ** (digits + 2))
    total = Fraction(0)
    n = 0
    while True:
        n += 1
        total += Fraction(1, n * 2**n)
        tail = Fraction(1, n * 2**n)
        if tail < target_tail:
            break
    lo, hi = _outward(total, total + tail, digits + 4)
    return ConstantEnclosure(Constant.LN2, lo, hi, digits)


class AffineValue(NamedTuple):
    """``q + p*pi + l*ln2`` with rational coefficients."""

    q: Fraction
    p: Fraction
    l: Fraction


class _Affine(Protocol):
    q: Fraction
    p: Fraction
    l: Fraction


class Sign(enum.IntEnum):
    NEGATIVE = -1
    INDETERMINATE = 0
    POSITIVE = 1


def affine_interval(
    v: _Affine, pi: ConstantEnclosure, ln2: ConstantEnclosure
) -> tuple[Fraction, Fraction]:
    if pi.target is not Constant.PI or ln2.target is not Constant.LN2:
        raise ValueError("enclosures must target pi and ln2 respectively")
    p_lo, p_hi = pi.scaled(Fraction(v.p))
    l_lo, l_hi = ln2.scaled(Fraction(v.l))
    return v.q + p_lo + l_lo, v.q + p_hi + l_hi


def sign_of_affine_combination(
    v: _Affine, pi: ConstantEnclosure, ln2: ConstantEnclosure
) -> Sign:
    lo, hi = affine_interval(v, pi, ln2)
    if lo > 0:
        return Sign.POSITIVE
    if hi < 0:
        return Sign.NEGATIVE
    return Sign.INDETERMINATE


def certified_sign(v: _Affine, digits: int = 20, retries: int = MAX_SIGN_RETRIES) -> Sign:
    """Sign of ``v``, doubling the enclosure precision on each indeterminate result."""
    for _ in range(retries + 1):
        s = sign_of_affine_combination(v, pi_enclosure(digits), ln2_enclosure(digits))
        if s is not Sign.INDETERMINATE:
            return s
        digits *= 2
    return Sign.INDETERMINATE


def _magnitude_digits(*xs: Fraction) -> int:
    big = max((abs(Fraction(x)) for x in xs), default=Fraction(0))
    if big <= 1:
        return 0
    return len(str(math.ceil(big)))


def evaluate_affine(v: _Affine, digits: int) -> tuple[Fraction, Fraction]:
    """Rigorous interval for ``v`` of width below ``10**-digits``."""
    work = digits + _magnitude_digits(v.p, v.l) + 2
    return affine_interval(v, pi_enclosure(work), ln2_enclosure(work))
