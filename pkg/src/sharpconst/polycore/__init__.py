"""Polynomial engine: exact/float polynomials, Legendre family, roots, norms."""

from .piecewise import PiecewisePolynomial, exact_integral
from .polynomial import (
    MAX_DEGREE,
    Polynomial,
    legendre,
    legendre_antiderivative,
    legendre_antiderivative_values,
    legendre_values,
    poly_calculus,
    poly_eval,
)
from .quadrature import (
    local_extrema,
    lq_integral,
    lq_norm,
    power_moments,
    power_rule,
    sign_segments,
    sup_norm,
)
from .roots import Root, isolate_roots, real_roots_float, squarefree_decomposition

__all__ = [
    "MAX_DEGREE",
    "PiecewisePolynomial",
    "Polynomial",
    "Root",
    "exact_integral",
    "isolate_roots",
    "legendre",
    "legendre_antiderivative",
    "legendre_antiderivative_values",
    "legendre_values",
    "local_extrema",
    "lq_integral",
    "lq_norm",
    "poly_calculus",
    "poly_eval",
    "power_moments",
    "power_rule",
    "real_roots_float",
    "sign_segments",
    "squarefree_decomposition",
    "sup_norm",
]
