import warnings
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dalzellbounds.bounds import (
    SERIES,
    BoundMethod,
    BoundPair,
    HypothesisWarning,
    MethodKind,
    MismatchError,
    OrientationError,
    PartialSumSide,
    SeriesId,
    SeriesKind,
    bound_for,
    calabrese_bounds,
    certify_bound_pair,
    dalzell_bounds,
    error_interval,
    forward_difference,
    johnsonbaugh_bounds,
    leibniz_bound,
    methods_for,
    partial_sum,
    proposition_bounds,
    side_of_partial_sum,
    true_error,
)
from dalzellbounds.dalzell import BackhouseClass
from dalzellbounds.exactnum import to_decimal

from oracles import PARTIAL_FRACTIONS, difference_by_binomials


@pytest.mark.parametrize("series, k, expected", [
    ("gls", 0, Fraction(0)),
    ("gls", 1, Fraction(1)),
    ("gls", 2, Fraction(2, 3)),
    ("ahs", 2, Fraction(1, 2)),
    ("lnsqrt2", 3, Fraction(1, 2) - Fraction(1, 4) + Fraction(1, 6)),
])
def test_partial_sum(series, k, expected):
    assert partial_sum(series, k) == expected


@given(st.integers(0, 300))
def test_partial_sum_matches_naive(k):
    for s in SERIES.values():
        naive = sum((Fraction((-1) ** (i + 1), s.term_denominator(i)) for i in range(1, k + 1)), Fraction(0))
        assert partial_sum(s, k) == naive
    assert partial_sum("ahs", k) == 2 * partial_sum("lnsqrt2", k)


def test_terms_positive_decreasing():
    for s in SERIES.values():
        terms = [s.term(i) for i in range(1, 200)]
        assert all(t > 0 for t in terms)
        assert all(a > b for a, b in zip(terms, terms[1:]))


@pytest.mark.parametrize("series, k, side", [
    ("gls", 1, PartialSumSide.ABOVE_TARGET),
    ("gls", 2, PartialSumSide.BELOW_TARGET),
    ("ahs", 1, PartialSumSide.ABOVE_TARGET),
    ("lnsqrt2", 4, PartialSumSide.BELOW_TARGET),
])
def test_side_of_partial_sum(series, k, side):
    assert side_of_partial_sum(series, k) is side


@pytest.mark.parametrize("k", range(1, 41))
def test_dalzell_n2_matches_proposition_1(k):
    pair = dalzell_bounds("gls", k, 2)
    assert pair.upper == Fraction(1, 4 * k)
    assert pair.lower == Fraction(2 * k + 3, 8 * k * k + 12 * k + 4)
    assert pair.method.m_exponents == (2 * k - 1, 2 * k + 1)


def test_dalzell_table_values():
    assert to_decimal(dalzell_bounds("gls", 10, 4).upper, 12) == "0.024938829287"
    p = dalzell_bounds("gls", 10, 8)
    assert to_decimal(p.upper, 12) == "0.024938258893"
    assert to_decimal(p.lower, 12) == "0.024938258199"


@pytest.mark.parametrize("k", [1, 2, 7, 30])
def test_dalzell_ahs_n2(k):
    pair = dalzell_bounds("ahs", k, 2)
    assert pair.upper == Fraction(1, 2 * k + 1)
    assert pair.lower == Fraction(k + 2, (k + 1) * (2 * k + 3))
    printed = proposition_bounds("ahs", k, 5)
    assert pair.lower > printed.lower


@pytest.mark.parametrize("series", ["gls", "lnsqrt2", "ahs"])
@pytest.mark.parametrize("n", [4, 6, 8, 10])
def test_next_variant_is_tighter_from_n6(series, n):
    for k in (1, 5, 25):
        nxt = dalzell_bounds(series, k, n, lower_from="next")
        prev = dalzell_bounds(series, k, n, lower_from="previous")
        assert nxt.upper == prev.upper
        if n >= 6:
            assert nxt.lower > prev.lower
        assert certify_bound_pair(nxt) and certify_bound_pair(prev)


def test_dalzell_argument_errors():
    with pytest.raises(ValueError):
        dalzell_bounds("gls", 0, 2)
    with pytest.raises(ValueError):
        dalzell_bounds("gls", 3, 3)
    with pytest.raises(ValueError):
        dalzell_bounds("gls", 1, 2, lower_from="previous")
    with pytest.raises(ValueError):
        dalzell_bounds("gls", 1, 2, lower_from="sideways")


def test_orientation_verified(monkeypatch):
    import dalzellbounds.bounds as b
    real = b._oriented_approximation

    def flipped(series, m, n, limit):
        value, side = real(series, m, n, limit)
        other = PartialSumSide.BELOW_TARGET if side is PartialSumSide.ABOVE_TARGET else PartialSumSide.ABOVE_TARGET
        return value, other

    monkeypatch.setattr(b, "_oriented_approximation", flipped)
    with pytest.raises(OrientationError):
        dalzell_bounds("gls", 4, 2)


@pytest.mark.parametrize("k, prop, lower, upper", [
    (10, 1, "0.024891774892", "0.025000000000"),
    (10, 3, "0.024938241107", "0.024938268253"),
    (20, 4, "0.012492211728", "0.012492211732"),
])
def test_proposition_table_values(k, prop, lower, upper):
    p = proposition_bounds("gls", k, prop)
    assert (to_decimal(p.lower, 12), to_decimal(p.upper, 12)) == (lower, upper)


def test_proposition_1_exact():
    assert proposition_bounds("gls", 10, 1).upper == Fraction(1, 40)


@pytest.mark.parametrize("prop", [2, 3, 4, 6])
def test_proposition_partial_fraction_forms(prop):
    series = "ahs" if prop == 6 else "gls"
    lo, up = PARTIAL_FRACTIONS[prop]
    for k in range(1, 101):
        p = proposition_bounds(series, k, prop)
        assert (p.lower, p.upper) == (lo(k), up(k))


def test_proposition_mismatch():
    with pytest.raises(MismatchError):
        proposition_bounds("ahs", 3, 1)
    with pytest.raises(MismatchError):
        proposition_bounds("gls", 3, 5)
    with pytest.raises(MismatchError):
        proposition_bounds("lnsqrt2", 3, 6)
    with pytest.raises(ValueError):
        proposition_bounds("gls", 3, 7)


def test_bounds_reject_k0():
    for fn in (lambda: proposition_bounds("gls", 0, 1), lambda: leibniz_bound("gls", 0),
               lambda: calabrese_bounds(0), lambda: johnsonbaugh_bounds("gls", 0, 1),
               lambda: true_error("gls", 0, 5)):
        with pytest.raises(ValueError):
            fn()


def test_leibniz():
    assert leibniz_bound("gls", 10) == Fraction(1, 21)
    assert to_decimal(leibniz_bound("gls", 20), 12) == "0.024390243902"
    assert leibniz_bound("ahs", 1) == Fraction(1, 2)


def test_calabrese():
    p = calabrese_bounds(10)
    assert (p.lower, p.upper) == (Fraction(1, 42), Fraction(1, 38))
    assert (to_decimal(p.lower, 12), to_decimal(p.upper, 12)) == ("0.023809523810", "0.026315789474")
    assert to_decimal(calabrese_bounds(20).upper, 12) == "0.012820512821"
    p = calabrese_bounds(1)
    assert (p.lower, p.upper) == (Fraction(1, 6), Fraction(1, 2))
    with pytest.raises(MismatchError):
        calabrese_bounds(3, "ahs")


@pytest.mark.parametrize("k", range(1, 60))
def test_forward_difference_closed_forms(k):
    assert forward_difference("gls", 1, k) == Fraction(2, 4 * k * k - 1)
    assert forward_difference("gls", 2, k) == Fraction(8, 8 * k**3 + 12 * k**2 - 2 * k - 3)


@given(st.sampled_from(list(SeriesId)), st.integers(0, 8), st.integers(1, 100))
def test_forward_difference_binomial_oracle(series, r, k):
    s = SERIES[series]
    assert forward_difference(series, r, k) == difference_by_binomials(s.term, r, k)


def test_forward_difference_zero_order():
    assert forward_difference("gls", 0, 3) == Fraction(1, 5)


@pytest.mark.parametrize("k", [1, 2, 10, 77])
def test_johnsonbaugh_j1(k):
    p = johnsonbaugh_bounds("gls", k, 1)
    assert p.lower == Fraction(k + 2, 4 * k * k + 8 * k + 3)
    assert p.upper == Fraction(k, 4 * k * k - 1)
    assert p.warnings == ()


def test_johnsonbaugh_table_values():
    assert to_decimal(johnsonbaugh_bounds("gls", 10, 2).upper, 12) == "0.024953688569"
    assert to_decimal(johnsonbaugh_bounds("gls", 20, 5).lower, 12) == "0.012492210893"


def test_johnsonbaugh_hypothesis_warning():
    wobbly = SeriesKind(SeriesId.GLS, "wobbly", SERIES[SeriesId.GLS].target, BackhouseClass.PI,
                        lambda i: i + 3 * (i % 2))
    with pytest.warns(HypothesisWarning):
        p = johnsonbaugh_bounds(wobbly, 2, 1, window=8)
    assert p.warnings


def test_true_error_values():
    assert true_error("gls", 10, 12) == "0.024938258665"
    # correctly rounded; the printed table shows ...731 (one unit in the last place away)
    assert true_error("gls", 20, 12) == "0.012492211730"
    assert true_error("ahs", 1, 6) == "0.306853"


def test_true_error_oracle(mp):
    for s in ("gls", "ahs", "lnsqrt2"):
        target = {"gls": mp.pi / 4, "ahs": mp.log(2), "lnsqrt2": mp.log(2) / 2}[s]
        for k in (1, 3, 17):
            ps = partial_sum(s, k)
            exact = abs(target - mp.mpf(ps.numerator) / ps.denominator)
            lo, hi = error_interval(s, k, 40)
            assert mp.mpf(lo.numerator) / lo.denominator < exact < mp.mpf(hi.numerator) / hi.denominator


def test_bound_pair_validation():
    m = BoundMethod(MethodKind.LEIBNIZ)
    with pytest.raises(ValueError):
        BoundPair(SeriesId.GLS, 1, m, Fraction(1, 2), Fraction(1, 3))
    with pytest.raises(ValueError):
        BoundPair(SeriesId.GLS, 1, m, Fraction(-1), Fraction(1, 3))
    assert BoundPair(SeriesId.GLS, 1, m, None, Fraction(1, 3)).lower is None


@pytest.mark.parametrize("token, label", [
    ("leibniz", "Leibniz"),
    ("calabrese", "Calabrese"),
    ("johnsonbaugh:3", "Johnsonbaugh (j=3)"),
    ("prop:2", "Proposition 2"),
    ("dalzell:6", "Dalzell (n=6)"),
    ("dalzell:6:next", "Dalzell (n=6, next)"),
])
def test_method_parse(token, label):
    m = BoundMethod.parse(token)
    assert m.label == label
    assert BoundMethod.parse(m.token) == m


@pytest.mark.parametrize("token", ["foo", "prop", "leibniz:2", "dalzell:4:up", "prop:x"])
def test_method_parse_errors(token):
    with pytest.raises(ValueError):
        BoundMethod.parse(token)


@settings(deadline=None, max_examples=40)
@given(st.sampled_from(list(SeriesId)), st.integers(1, 60))
def test_every_method_sandwiches(series, k):
    for method in methods_for(series):
        assert certify_bound_pair(bound_for(method, series, k)), method.label


def test_scaling_lock():
    for k in range(1, 30):
        for method in methods_for("ahs"):
            if method.kind is MethodKind.PROPOSITION:
                continue
            a, h = bound_for(method, "ahs", k), bound_for(method, "lnsqrt2", k)
            assert a.upper == 2 * h.upper
            assert a.lower is None or a.lower == 2 * h.lower


def test_concurrent_evaluation_is_order_independent():
    cells = [(m, k) for m in methods_for("gls") for k in range(1, 25)]
    serial = [bound_for(m, "gls", k) for m, k in cells]
    with ThreadPoolExecutor(max_workers=8) as pool:
        parallel = list(pool.map(lambda c: bound_for(c[0], "gls", c[1]), reversed(cells)))
    assert serial == parallel[::-1]
