"""Certified error bounds for the Gregory-Leibniz and alternating harmonic series.

Bounds are derived from exact evaluation of the integrals
I(m, n) = int_0^1 x^m (1-x)^n / (1+x^2) dx, alongside the classical
Leibniz, Calabrese and Johnsonbaugh estimates.
"""

from .bounds import (
    BoundMethod,
    BoundPair,
    SeriesId,
    calabrese_bounds,
    certify_bound_pair,
    dalzell_bounds,
    forward_difference,
    johnsonbaugh_bounds,
    leibniz_bound,
    partial_sum,
    proposition_bounds,
    side_of_partial_sum,
    true_error,
)
from .dalzell import classify, constant_approximation, dalzell_integral
from .exactnum import ln2_enclosure, pi_enclosure, sign_of_affine_combination, to_decimal

__version__ = "0.1.0"

__all__ = [
    "BoundMethod",
    "BoundPair",
    "SeriesId",
    "calabrese_bounds",
    "certify_bound_pair",
    "classify",
    "constant_approximation",
    "dalzell_bounds",
    "dalzell_integral",
    "forward_difference",
    "johnsonbaugh_bounds",
    "leibniz_bound",
    "ln2_enclosure",
    "partial_sum",
    "pi_enclosure",
    "proposition_bounds",
    "side_of_partial_sum",
    "sign_of_affine_combination",
    "to_decimal",
    "true_error",
]
