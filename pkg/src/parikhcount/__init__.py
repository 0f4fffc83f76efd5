"""Exact Parikh counting functions of bounded context-free languages.

The package turns a bounded context-free language (or directly a non-negative
Diophantine system, or a semilinear set) into an exact piecewise
quasi-polynomial counting function over conic regions, together with its
rational generating function, and checks every construction against
brute-force enumeration.
"""

from .polynomials import MultiPoly, Rational, power_sum_polynomial, prefix_sum_polynomial
from .quasipolys import QuasiPolynomial, floor_affine_qp, qp_add, qp_eval, qp_refit
from .chambers import Arrangement, BoxSpline, Hyperplane, bs_add, sign_vector
from .partition import (
    DiophantineSystem,
    RayFunctional,
    box_spline_of_system,
    extend_arrangement,
    lambda_functional,
    sum_over_interval,
)
from .semilinear import (
    LinearSet,
    SemilinearSet,
    SemiSimpleSet,
    decompose_semisimple,
    is_simple,
    sl_member,
)
from .grammars import Grammar, parse_grammar_file
from .langfront import (
    BoundedLanguage,
    CountingFunction,
    Morphism,
    cross_section,
    decide_parikh_slender,
    diophantine_systems,
    index_set,
    inverse_morphism_intersect,
    parikh_counting_function,
    parikh_image,
    parikh_vector,
)
from .series import RationalSeriesExpr, generating_function, taylor_coefficients

__all__ = [
    "Arrangement",
    "BoundedLanguage",
    "BoxSpline",
    "CountingFunction",
    "DiophantineSystem",
    "Grammar",
    "Hyperplane",
    "LinearSet",
    "Morphism",
    "MultiPoly",
    "QuasiPolynomial",
    "Rational",
    "RationalSeriesExpr",
    "RayFunctional",
    "SemiSimpleSet",
    "SemilinearSet",
    "box_spline_of_system",
    "bs_add",
    "cross_section",
    "decide_parikh_slender",
    "decompose_semisimple",
    "diophantine_systems",
    "extend_arrangement",
    "floor_affine_qp",
    "generating_function",
    "index_set",
    "inverse_morphism_intersect",
    "is_simple",
    "lambda_functional",
    "parikh_counting_function",
    "parikh_image",
    "parikh_vector",
    "parse_grammar_file",
    "power_sum_polynomial",
    "prefix_sum_polynomial",
    "qp_add",
    "qp_eval",
    "qp_refit",
    "sign_vector",
    "sl_member",
    "sum_over_interval",
    "taylor_coefficients",
]
