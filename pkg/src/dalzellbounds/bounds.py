"""Error bounds for partial sums of three alternating series.

The series are the Gregory-Leibniz series (sum to pi/4), the half-scale
alternating harmonic series 1/2 - 1/4 + 1/6 - ... (sum to ln sqrt 2) and the
alternating harmonic series itself (sum to ln 2).

Bounds come in two independent flavours that are meant to be cross-checked:

* ``dalzell_bounds`` derives them from positivity of I(m, n), picking the
  exponent m from k and verifying orientation exactly at runtime;
* ``proposition_bounds`` evaluates fixed closed-form rational functions of k.

The classical Leibniz, Calabrese and Johnsonbaugh estimates are included for
comparison.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Union

from .dalzell import (
    DEFAULT_LIMIT,
    ApproximationSide,
    BackhouseClass,
    constant_approximation,
)
from .exactnum import (
    MAX_SIGN_RETRIES,
    DecimalString,
    ln2_enclosure,
    pi_enclosure,
    to_decimal,
)

__all__ = [
    "SeriesId",
    "Target",
    "SeriesKind",
    "SERIES",
    "get_series",
    "PartialSumSide",
    "MethodKind",
    "BoundMethod",
    "BoundPair",
    "OrientationError",
    "MismatchError",
    "HypothesisWarning",
    "PROPOSITIONS",
    "partial_sum",
    "side_of_partial_sum",
    "target_interval",
    "error_interval",
    "dalzell_bounds",
    "proposition_bounds",
    "leibniz_bound",
    "calabrese_bounds",
    "forward_difference",
    "johnsonbaugh_bounds",
    "true_error",
    "bound_for",
    "methods_for",
    "certify_bound_pair",
]


class OrientationError(ArithmeticError):
    """A Dalzell approximation landed on the wrong side of the target."""


class MismatchError(ValueError):
    """A method was requested for a series it does not apply to."""


class HypothesisWarning(UserWarning):
    """Monotone-difference hypothesis failed on the checked window."""


class SeriesId(enum.Enum):
    GLS = "gls"
    HALF_LN2 = "lnsqrt2"
    AHS = "ahs"


class Target(enum.Enum):
    PI_OVER_4 = "pi/4"
    LN_SQRT2 = "ln(sqrt 2)"
    LN2 = "ln 2"


@dataclass(frozen=True)
class SeriesKind:
    id: SeriesId
    name: str
    target: Target
    dalzell_class: BackhouseClass
    term_denominator: Callable[[int], int] = field(repr=False)
    # factor taking the bare constant (pi or ln 2) to the target
    constant_factor: Fraction = Fraction(1)
    # factor from the half-scale ln sqrt 2 series to this one
    scale: Fraction = Fraction(1)

    def term(self, i: int) -> Fraction:
        if i < 1:
            raise ValueError("terms are indexed from 1")
        return Fraction(1, self.term_denominator(i))


GLS = SeriesKind(
    SeriesId.GLS, "Gregory-Leibniz", Target.PI_OVER_4, BackhouseClass.PI,
    lambda i: 2 * i - 1, Fraction(1, 4),
)
HALF_LN2 = SeriesKind(
    SeriesId.HALF_LN2, "half alternating harmonic", Target.LN_SQRT2, BackhouseClass.LN2,
    lambda i: 2 * i, Fraction(1, 2),
)
AHS = SeriesKind(
    SeriesId.AHS, "alternating harmonic", Target.LN2, BackhouseClass.LN2,
    lambda i: i, Fraction(1), Fraction(2),
)

SERIES = {s.id: s for s in (GLS, HALF_LN2, AHS)}

SeriesLike = Union[SeriesKind, SeriesId, str]


def get_series(series: SeriesLike) -> SeriesKind:
    if isinstance(series, SeriesKind):
        return series
    if isinstance(series, str):
        series = SeriesId(series.lower())
    return SERIES[series]


class PartialSumSide(enum.Enum):
    ABOVE_TARGET = "AboveTarget"
    BELOW_TARGET = "BelowTarget"


class MethodKind(enum.Enum):
    DALZELL = "dalzell"
    PROPOSITION = "prop"
    LEIBNIZ = "leibniz"
    CALABRESE = "calabrese"
    JOHNSONBAUGH = "johnsonbaugh"


@dataclass(frozen=True)
class BoundMethod:
    kind: MethodKind
    param: int | None = None
    variant: str | None = None
    m_exponents: tuple[int, ...] = field(default=(), compare=False)

    @property
    def label(self) -> str:
        if self.kind is MethodKind.DALZELL:
            extra = f", {self.variant}" if self.variant and self.variant != "auto" else ""
            return f"Dalzell (n={self.param}{extra})"
        if self.kind is MethodKind.PROPOSITION:
            return f"Proposition {self.param}"
        if self.kind is MethodKind.JOHNSONBAUGH:
            return f"Johnsonbaugh (j={self.param})"
        return self.kind.value.capitalize()

    @property
    def token(self) -> str:
        if self.param is None:
            return self.kind.value
        tok = f"{self.kind.value}:{self.param}"
        if self.variant and self.variant != "auto":
            tok += f":{self.variant}"
        return tok

    @classmethod
    def parse(cls, token: str) -> BoundMethod:
        """Parse ``leibniz``, ``calabrese``, ``johnsonbaugh:J``, ``prop:P`` or ``dalzell:N[:next|previous]``."""
        parts = token.strip().lower().split(":")
        try:
            kind = MethodKind(parts[0])
        except ValueError:
            raise ValueError(f"unknown method {token!r}") from None
        if kind in (MethodKind.LEIBNIZ, MethodKind.CALABRESE):
            if len(parts) != 1:
                raise ValueError(f"{kind.value} takes no parameter")
            return cls(kind)
        if len(parts) < 2 or not parts[1].isdigit():
            raise ValueError(f"{kind.value} needs an integer parameter, e.g. {kind.value}:2")
        variant = None
        if len(parts) == 3 and kind is MethodKind.DALZELL:
            variant = parts[2]
            if variant not in ("auto", "next", "previous"):
                raise ValueError(f"unknown Dalzell variant {variant!r}")
        elif len(parts) > 2:
            raise ValueError(f"malformed method {token!r}")
        return cls(kind, int(parts[1]), variant)


@dataclass(frozen=True)
class BoundPair:
    series: SeriesId
    k: int
    method: BoundMethod
    lower: Fraction | None
    upper: Fraction
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        if self.lower is not None and not 0 <= self.lower < self.upper:
            raise ValueError(f"invalid bound pair: {self.lower} !< {self.upper}")


def _require_k(k: int) -> None:
    if k < 1:
        raise ValueError("bounds need k >= 1")


@lru_cache(maxsize=4096)
def _partial_sum(series: SeriesKind, k: int) -> Fraction:
    if k == 0:
        return Fraction(0)
    dens = [series.term_denominator(i) for i in range(1, k + 1)]
    den = math.lcm(*dens)
    num = sum((den // d) if i % 2 == 0 else -(den // d) for i, d in enumerate(dens))
    return Fraction(num, den)


def partial_sum(series: SeriesLike, k: int) -> Fraction:
    if k < 0:
        raise ValueError("k must be nonnegative")
    return _partial_sum(get_series(series), k)


def target_interval(series: SeriesLike, digits: int) -> tuple[Fraction, Fraction]:
    s = get_series(series)
    enc = pi_enclosure(digits) if s.target is Target.PI_OVER_4 else ln2_enclosure(digits)
    return enc.scaled(s.constant_factor)


@lru_cache(maxsize=4096)
def _side_of_partial_sum(series: SeriesKind, k: int) -> PartialSumSide:
    expected = PartialSumSide.ABOVE_TARGET if k % 2 else PartialSumSide.BELOW_TARGET
    s = _partial_sum(series, k)
    digits = 20
    for _ in range(MAX_SIGN_RETRIES + 1):
        lo, hi = target_interval(series, digits)
        if s > hi:
            observed = PartialSumSide.ABOVE_TARGET
        elif s < lo:
            observed = PartialSumSide.BELOW_TARGET
        else:
            digits *= 2
            continue
        if observed is not expected:
            raise OrientationError(f"partial sum {k} of {series.name} is {observed.value}")
        return observed
    raise OrientationError(f"could not separate partial sum {k} from its target")


def side_of_partial_sum(series: SeriesLike, k: int) -> PartialSumSide:
    """Odd partial sums overshoot the target; checked against an enclosure."""
    _require_k(k)
    return _side_of_partial_sum(get_series(series), k)


def error_interval(series: SeriesLike, k: int, digits: int) -> tuple[Fraction, Fraction]:
    """Rigorous interval containing |target - partial_sum(k)|."""
    s = get_series(series)
    ps = _partial_sum(s, k)
    lo, hi = target_interval(s, digits)
    if ps > hi:
        return ps - hi, ps - lo
    if ps < lo:
        return lo - ps, hi - ps
    return Fraction(0), max(ps - lo, hi - ps)


def _oriented_approximation(
    series: SeriesKind, m: int, n: int, limit: int
) -> tuple[Fraction, PartialSumSide]:
    """Approximation of the series target from I(m, n) and its side relative to that target."""
    approx = constant_approximation(m, n, limit)
    value = approx.value * series.constant_factor
    side = (
        PartialSumSide.ABOVE_TARGET
        if approx.side is ApproximationSide.TARGET_BELOW
        else PartialSumSide.BELOW_TARGET
    )
    return value, side


def dalzell_bounds(
    series: SeriesLike,
    k: int,
    n: int,
    *,
    lower_from: str = "auto",
    limit: int = DEFAULT_LIMIT,
) -> BoundPair:
    """Two-sided error bound for partial sum ``k`` from I(m, n) > 0.

    The upper bound uses the exponent m_up, for which the rational
    approximation lies beyond the target as seen from the partial sum. The
    lower bound uses m_up + 2 (``"next"``) or m_up - 2 (``"previous"``); the
    approximation then falls strictly between partial sum and target.
    ``"auto"`` picks next for n <= 4 and previous for n >= 6, which reproduces
    the closed forms in :data:`PROPOSITIONS`.
    """
    s = get_series(series)
    _require_k(k)
    if n < 2 or n % 2:
        raise ValueError("n must be even and >= 2")
    if lower_from == "auto":
        lower_from = "next" if n <= 4 else "previous"
    if lower_from not in ("next", "previous"):
        raise ValueError(f"lower_from must be auto, next or previous, not {lower_from!r}")

    offset = -2 if s.dalzell_class is BackhouseClass.PI else -1
    m_up = 2 * k + n // 2 + offset
    m_lo = m_up + 2 if lower_from == "next" else m_up - 2
    if m_lo < 0:
        raise ValueError(f"no previous exponent for k={k}, n={n}")

    ps = _partial_sum(s, k)
    ps_side = _side_of_partial_sum(s, k)

    rho_up, up_side = _oriented_approximation(s, m_up, n, limit)
    if up_side is ps_side:
        raise OrientationError(f"I({m_up},{n}) approximation is on the partial sum's side")

    rho_lo, lo_side = _oriented_approximation(s, m_lo, n, limit)
    toward_target = rho_lo < ps if ps_side is PartialSumSide.ABOVE_TARGET else rho_lo > ps
    if lo_side is not ps_side or not toward_target:
        raise OrientationError(f"I({m_lo},{n}) approximation is not between partial sum and target")

    method = BoundMethod(MethodKind.DALZELL, n, lower_from, (m_up, m_lo))
    return BoundPair(s.id, k, method, abs(rho_lo - ps), abs(rho_up - ps))


# Closed forms as polynomials in k, highest degree first:
# prop -> (series, (lower numerator, lower denominator), (upper numerator, upper denominator))
PROPOSITIONS: dict[int, tuple[SeriesId, tuple[tuple[int, ...], tuple[int, ...]], tuple[tuple[int, ...], tuple[int, ...]]]] = {
    1: (SeriesId.GLS,
        ((2, 3), (8, 12, 4)),
        ((1,), (4, 0))),
    2: (SeriesId.GLS,
        ((4, 26, 58, 47), (16, 104, 236, 214, 60)),
        ((2, 6, 5), (8, 24, 22, 6))),
    3: (SeriesId.GLS,
        ((8, 40, 68, 40, -3), (32, 160, 280, 200, 48, 0)),
        ((16, 168, 696, 1428, 1454, 567), (64, 672, 2800, 5880, 6496, 3528, 720))),
    4: (SeriesId.GLS,
        ((8, 112, 642, 1932, 3226, 2828, 981),
         (32, 448, 2576, 7840, 13538, 13132, 6534, 1260)),
        ((16, 344, 3132, 15678, 46730, 83320, 82854, 35631),
         (64, 1376, 12544, 63056, 190036, 348614, 375066, 211284, 45360))),
    5: (SeriesId.AHS,
        ((2, 3), (4, 9, 5)),
        ((1,), (2, 1))),
    6: (SeriesId.AHS,
        ((4, 32, 87, 83), (8, 68, 208, 268, 120)),
        ((4, 16, 17), (8, 36, 52, 24))),
}


def _horner(coeffs: tuple[int, ...], k: int) -> int:
    acc = 0
    for c in coeffs:
        acc = acc * k + c
    return acc


def proposition_bounds(series: SeriesLike, k: int, prop_id: int) -> BoundPair:
    s = get_series(series)
    _require_k(k)
    if prop_id not in PROPOSITIONS:
        raise ValueError(f"unknown proposition {prop_id}")
    owner, (lo_num, lo_den), (up_num, up_den) = PROPOSITIONS[prop_id]
    if owner is not s.id:
        raise MismatchError(f"proposition {prop_id} applies to {owner.value}, not {s.id.value}")
    lower = Fraction(_horner(lo_num, k), _horner(lo_den, k))
    upper = Fraction(_horner(up_num, k), _horner(up_den, k))
    return BoundPair(s.id, k, BoundMethod(MethodKind.PROPOSITION, prop_id), lower, upper)


def leibniz_bound(series: SeriesLike, k: int) -> Fraction:
    """The first omitted term bounds the error from above."""
    _require_k(k)
    return get_series(series).term(k + 1)


def calabrese_bounds(k: int, series: SeriesLike = SeriesId.GLS) -> BoundPair:
    s = get_series(series)
    _require_k(k)
    if s.id is not SeriesId.GLS:
        raise MismatchError("Calabrese bounds are instantiated for the Gregory-Leibniz series only")
    return BoundPair(s.id, k, BoundMethod(MethodKind.CALABRESE),
                     Fraction(1, 4 * k + 2), Fraction(1, 4 * k - 2))


def _difference_table(series: SeriesKind, start: int, length: int, depth: int) -> list[list[Fraction]]:
    """Rows r = 0..depth of forward differences of the terms a_start, a_start+1, ..."""
    row = [series.term(i) for i in range(start, start + length + depth)]
    rows = [row]
    for _ in range(depth):
        row = [a - b for a, b in zip(row, row[1:])]
        rows.append(row)
    return rows


@lru_cache(maxsize=8192)
def _forward_difference(series: SeriesKind, r: int, k: int) -> Fraction:
    return _difference_table(series, k, 1, r)[r][0]


def forward_difference(series: SeriesLike, r: int, k: int) -> Fraction:
    """r-th forward difference of the unsigned terms at index k (r = 0 gives a_k)."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    _require_k(k)
    return _forward_difference(get_series(series), r, k)


def _monotone_window_failures(series: SeriesKind, k: int, j: int, window: int) -> list[str]:
    rows = _difference_table(series, k, window + 2, j)
    failures = []
    for r in range(1, j + 1):
        row = rows[r][: window + 2]
        if any(x <= 0 for x in row) or any(a <= b for a, b in zip(row, row[1:])):
            failures.append(f"difference of order {r} not positive and decreasing on [{k}, {k + window}]")
    return failures


def johnsonbaugh_bounds(series: SeriesLike, k: int, j: int, *, window: int = 64) -> BoundPair:
    s = get_series(series)
    _require_k(k)
    if j < 1:
        raise ValueError("j must be >= 1")
    lower = sum(
        (_forward_difference(s, r, k + 1) / 2 ** (r + 1) for r in range(j + 1)), Fraction(0)
    )
    upper = s.term(k) / 2 - sum(
        (_forward_difference(s, r, k) / 2 ** (r + 1) for r in range(1, j + 1)), Fraction(0)
    )
    notes = tuple(_monotone_window_failures(s, k, j, window))
    for note in notes:
        warnings.warn(note, HypothesisWarning, stacklevel=2)
    return BoundPair(s.id, k, BoundMethod(MethodKind.JOHNSONBAUGH, j), lower, upper, notes)


def true_error(series: SeriesLike, k: int, digits: int) -> DecimalString:
    """|target - partial_sum(k)| rounded to ``digits`` places from a tight enclosure."""
    _require_k(k)
    if digits < 1:
        raise ValueError("digits must be >= 1")
    lo, hi = error_interval(series, k, digits + 3)
    return to_decimal((lo + hi) / 2, digits)


def bound_for(method: BoundMethod, series: SeriesLike, k: int, *, limit: int = DEFAULT_LIMIT) -> BoundPair:
    """Evaluate any method as a :class:`BoundPair` (Leibniz has no lower side)."""
    s = get_series(series)
    kind = method.kind
    if kind is MethodKind.DALZELL:
        return dalzell_bounds(s, k, method.param, lower_from=method.variant or "auto", limit=limit)
    if kind is MethodKind.PROPOSITION:
        return proposition_bounds(s, k, method.param)
    if kind is MethodKind.LEIBNIZ:
        return BoundPair(s.id, k, method, None, leibniz_bound(s, k))
    if kind is MethodKind.CALABRESE:
        return calabrese_bounds(k, s)
    if kind is MethodKind.JOHNSONBAUGH:
        return johnsonbaugh_bounds(s, k, method.param)
    raise ValueError(f"unsupported method {method}")


def methods_for(series: SeriesLike, n_max: int = 8, j_max: int = 5) -> list[BoundMethod]:
    """Every method that applies to ``series``, both Dalzell lower variants included."""
    s = get_series(series)
    out = [BoundMethod(MethodKind.LEIBNIZ)]
    if s.id is SeriesId.GLS:
        out.append(BoundMethod(MethodKind.CALABRESE))
    out += [BoundMethod(MethodKind.JOHNSONBAUGH, j) for j in range(1, j_max + 1)]
    out += [BoundMethod(MethodKind.PROPOSITION, p) for p, spec in PROPOSITIONS.items() if spec[0] is s.id]
    for n in range(2, n_max + 1, 2):
        out.append(BoundMethod(MethodKind.DALZELL, n, "next"))
        if n >= 4:
            out.append(BoundMethod(MethodKind.DALZELL, n, "previous"))
    return out


def certify_bound_pair(pair: BoundPair, digits: int = 30, retries: int = MAX_SIGN_RETRIES) -> bool:
    """True iff lower < |error| < upper is proven against a constant enclosure."""
    for _ in range(retries + 1):
        lo, hi = error_interval(pair.series, pair.k, digits)
        low_ok = pair.lower is None or pair.lower < lo
        if low_ok and hi < pair.upper:
            return True
        if (pair.lower is not None and pair.lower >= hi) or pair.upper <= lo:
            return False
        digits *= 2
    return False
