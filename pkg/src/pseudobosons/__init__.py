"""Exact verification engine for pseudo-bosonic ladder structures.

Covers the 2-D harmonic oscillator in Gaussian-weighted spaces (biorthogonal
Hermite families, multiplier intertwiners) and the D2-type Calogero model
(gauge transform, similarity chain, eigenfunctions, commutation identities).
"""

__version__ = "0.1.0"

from .scalar import RadScalar, parse_rational  # noqa: E402
from .funcspace import Element, GradedSeries, PolyN, homogeneous_components, symmetrize_d2  # noqa: E402
from .opalg import (  # noqa: E402
    DiffOp,
    NonTerminatingSeriesError,
    ad_exp,
    apply,
    apply_exp,
    commutator,
    compose,
    formal_dagger,
    formal_star,
    op_equal_on_span,
)
from .gaussint import (  # noqa: E402
    TSpaceVector,
    WeightSpec,
    gaussian_moment,
    inner_product_T,
    inner_product_pi,
    quad_oracle,
)
from .report import Check, Report  # noqa: E402

__all__ = [
    "RadScalar",
    "parse_rational",
    "Element",
    "GradedSeries",
    "PolyN",
    "homogeneous_components",
    "symmetrize_d2",
    "DiffOp",
    "NonTerminatingSeriesError",
    "ad_exp",
    "apply",
    "apply_exp",
    "commutator",
    "compose",
    "formal_dagger",
    "formal_star",
    "op_equal_on_span",
    "TSpaceVector",
    "WeightSpec",
    "gaussian_moment",
    "inner_product_T",
    "inner_product_pi",
    "quad_oracle",
    "Check",
    "Report",
]
