"""Exact evaluation of I(m, n) = integral over [0, 1] of x^m (1-x)^n / (1+x^2).

Dividing the numerator by 1+x^2 leaves a polynomial quotient (integrated
termwise) and a remainder a + b x, whose two pieces integrate to a*pi/4 and
b*ln(2)/2. The result is therefore an exact triple (q, p, l) standing for
q + p*pi + l*ln2.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from .exactnum import Constant, format_rational

__all__ = [
    "DEFAULT_LIMIT",
    "ResourceLimitError",
    "MixedClassError",
    "DegenerateApproximationError",
    "Polynomial",
    "DalzellValue",
    "BackhouseClass",
    "ApproximationSide",
    "RationalApproximation",
    "expand_integrand",
    "divide_by_circle",
    "integrate_unit",
    "dalzell_integral",
    "classify",
    "constant_approximation",
]

DEFAULT_LIMIT = 512


class ResourceLimitError(ValueError):
    """An exponent exceeds the configured size limit."""


class MixedClassError(ValueError):
    """2m - n is odd, so both pi and ln 2 appear in the integral."""


class DegenerateApproximationError(ArithmeticError):
    """The coefficient of the target constant vanished unexpectedly."""


@dataclass(frozen=True)
class Polynomial:
    """Dense polynomial with rational coefficients, lowest degree first."""

    coeffs: tuple[Fraction, ...] = ()

    def __post_init__(self):
        c = [Fraction(x) for x in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def from_coeffs(cls, coeffs: Iterable) -> Polynomial:
        return cls(tuple(coeffs))

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def __add__(self, other: Polynomial) -> Polynomial:
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial(tuple(self[i] + other[i] for i in range(n)))

    def __neg__(self) -> Polynomial:
        return Polynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other: Polynomial) -> Polynomial:
        return self + (-other)

    def __mul__(self, other: Polynomial) -> Polynomial:
        if self.is_zero() or other.is_zero():
            return Polynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Polynomial(tuple(out))

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c:
                parts.append(f"{c}" if i == 0 else f"{c}*x^{i}")
        return " + ".join(parts)


CIRCLE = Polynomial((1, 0, 1))


def _check_limit(m: int, n: int, limit: int) -> None:
    if m < 0 or n < 0:
        raise ValueError("exponents must be nonnegative")
    if m > limit or n > limit:
        raise ResourceLimitError(f"exponent exceeds limit {limit}: m={m}, n={n}")


def expand_integrand(m: int, n: int) -> Polynomial:
    """x^m (1-x)^n expanded by the binomial theorem."""
    coeffs = [0] * (m + n + 1)
    for j in range(n + 1):
        coeffs[m + j] = (-1) ** j * math.comb(n, j)
    return Polynomial(tuple(coeffs))


def divide_by_circle(p: Polynomial) -> tuple[Polynomial, Polynomial]:
    """Quotient and remainder of ``p`` by 1 + x^2 (remainder degree <= 1)."""
    r = list(p.coeffs)
    if len(r) < 3:
        return Polynomial(), Polynomial(tuple(r))
    q = [Fraction(0)] * (len(r) - 2)
    for d in range(len(r) - 1, 1, -1):
        c = r[d]
        if c:
            q[d - 2] = c
            r[d - 2] -= c
            r[d] = 0
    return Polynomial(tuple(q)), Polynomial(tuple(r[:2]))


def integrate_unit(p: Polynomial) -> Fraction:
    """Exact integral of ``p`` over [0, 1]."""
    terms = [(c.numerator, c.denominator * (i + 1)) for i, c in enumerate(p.coeffs) if c]
    if not terms:
        return Fraction(0)
    # One common denominator; summing Fractions pairwise is far slower at high degree.
    den = math.lcm(*(d for _, d in terms))
    return Fraction(sum(a * (den // d) for a, d in terms), den)


class BackhouseClass(enum.Enum):
    PI = "PiClass"
    LN2 = "Ln2Class"
    MIXED = "MixedClass"

    def __str__(self) -> str:
        return self.value


def classify(m: int, n: int) -> BackhouseClass:
    r = (2 * m - n) % 4
    if r == 0:
        return BackhouseClass.PI
    if r == 2:
        return BackhouseClass.LN2
    return BackhouseClass.MIXED


@dataclass(frozen=True)
class DalzellValue:
    q: Fraction
    p: Fraction
    l: Fraction
    m: int
    n: int

    @property
    def backhouse_class(self) -> BackhouseClass:
        return classify(self.m, self.n)

    def __str__(self) -> str:
        return (
            f"{format_rational(self.q)} + ({format_rational(self.p)})*pi"
            f" + ({format_rational(self.l)})*ln2"
        )


@lru_cache(maxsize=4096)
def dalzell_integral(m: int, n: int, limit: int = DEFAULT_LIMIT) -> DalzellValue:
    _check_limit(m, n, limit)
    quotient, remainder = divide_by_circle(expand_integrand(m, n))
    a, b = remainder[0], remainder[1]
    return DalzellValue(
        q=integrate_unit(quotient),
        p=a / 4,
        l=b / 2,
        m=m,
        n=n,
    )


class ApproximationSide(enum.Enum):
    TARGET_BELOW = "TargetBelow"
    TARGET_ABOVE = "TargetAbove"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class RationalApproximation:
    """``value`` bounds ``target`` from one side, as implied by I(m, n) > 0."""

    target: Constant
    value: Fraction
    side: ApproximationSide
    m: int
    n: int


def constant_approximation(m: int, n: int, limit: int = DEFAULT_LIMIT) -> RationalApproximation:
    cls = classify(m, n)
    if cls is BackhouseClass.MIXED:
        raise MixedClassError(f"2m - n = {2 * m - n} is odd; no single-constant approximation")
    v = dalzell_integral(m, n, limit)
    if cls is BackhouseClass.PI:
        target, coeff = Constant.PI, v.p
    else:
        target, coeff = Constant.LN2, v.l
    if coeff == 0:
        raise DegenerateApproximationError(f"{target.value} coefficient of I({m},{n}) is zero")
    # q + c*t > 0 gives t < -q/c when c < 0, and t > -q/c when c > 0.
    side = ApproximationSide.TARGET_BELOW if coeff < 0 else ApproximationSide.TARGET_ABOVE
    return RationalApproximation(target, -v.q / coeff, side, m, n)
