"""Exact symbolic exterior calculus over named coordinate charts."""

from .certify import (
    CertificationReport,
    Interval,
    SmoothFunction,
    certify_positive,
    eval_float,
    eval_interval,
)
from .charts import ANGULAR, LINEAR, AngularComponent, Chart, CoordMap, identity_map
from .expr import (
    ONE,
    ZERO,
    Expr,
    canon,
    coordinate,
    cosine,
    differentiate,
    exponential,
    function,
    rational,
    sine,
)
from .forms import (
    DifferentialForm,
    VectorField,
    contract,
    d_coordinate,
    ext_d,
    lie_derivative,
    one_form,
    pullback,
    scalar_form,
    top_coefficient,
    wedge,
    wedge_all,
    wedge_power,
    zero_form,
)
from .sexpr import expr_from_sexp, expr_to_sexp, form_from_sexp, form_to_sexp

__all__ = [
    "ANGULAR",
    "AngularComponent",
    "CertificationReport",
    "Chart",
    "CoordMap",
    "DifferentialForm",
    "Expr",
    "Interval",
    "LINEAR",
    "ONE",
    "SmoothFunction",
    "VectorField",
    "ZERO",
    "canon",
    "certify_positive",
    "contract",
    "coordinate",
    "cosine",
    "d_coordinate",
    "differentiate",
    "eval_float",
    "eval_interval",
    "expr_from_sexp",
    "expr_to_sexp",
    "exponential",
    "ext_d",
    "form_from_sexp",
    "form_to_sexp",
    "function",
    "identity_map",
    "lie_derivative",
    "one_form",
    "pullback",
    "rational",
    "scalar_form",
    "sine",
    "top_coefficient",
    "wedge",
    "wedge_all",
    "wedge_power",
    "zero_form",
]
