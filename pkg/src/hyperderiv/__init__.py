"""Noncommutative operator calculus with a finite-matrix verification oracle.

Exact hyperoperator algebra (symmetrized products, degree-shift and
replacement derivations, ordered multivariate differentials, rearrangement,
integral representations of operator derivatives) plus numerically verified
exponential-product formulas.
"""

from .errors import (
    ArityMismatch,
    BadDimension,
    ExprSyntaxError,
    HyperderivError,
    NotInSymDomain,
    QuadratureNotConverged,
    SpectrumOutOfDomain,
    UnassignedSymbol,
    UnknownIdentity,
)
from .freealg import (
    NcPoly,
    Symbol,
    as_poly,
    poly_mul,
    sym_decompose,
    sym_product,
    sym_product_oracle,
)
from .parser import format_poly, parse
from .hyperops import (
    SLOT,
    Delta,
    HyperExpr,
    HyperProd,
    HyperScale,
    HyperSum,
    LeftMul,
    PartialDelta,
    SlotDelta,
    SlotProduct,
    apply_hyper,
    d_arrow,
    delta_arrow,
    flatten,
    hyper_from_obj,
    hyper_identity,
    hyper_to_obj,
    hyper_zero,
    inner_derivation,
    ordered_differential,
    rearrange,
)
from .commpoly import CommPoly, CommutingHyperPoly, format_commpoly, hyper_vars
from .series import ScalarSeries, parse_series
from .qderiv import (
    ParamPoly,
    derivative_hyper,
    differential,
    multivariate_taylor,
    nth_differential,
    partial_derivative,
    shift,
    substitute_shifts,
    taylor,
)

__version__ = "0.1.0"
