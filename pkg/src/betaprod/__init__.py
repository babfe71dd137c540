"""Exact density, distribution function and quantiles of a product of
independent Beta random variables."""

from .evaluator import DensityModel, build_model, cdf, evaluate, pdf, pdf_interpolated_alpha, quantile
from .exceptions import (
    BetaProdError,
    ConvergenceError,
    DomainError,
    GenericityError,
    PoleError,
    ValidationError,
)
from .model import (
    BetaFactor,
    ProductSpec,
    make_spec,
    mms_spec,
    moment,
    parse_uv,
    state_determinant_spec,
)
from .series_origin import build_origin, eval_origin_cdf, eval_origin_pdf, m2_closed_pdf, m2_log_pdf
from .series_unit import build_unit, eval_unit_cdf, eval_unit_pdf

__version__ = "0.1.0"

__all__ = [
    "BetaFactor", "BetaProdError", "ConvergenceError", "DensityModel", "DomainError",
    "GenericityError", "PoleError", "ProductSpec", "ValidationError", "build_model",
    "build_origin", "build_unit", "cdf", "eval_origin_cdf", "eval_origin_pdf",
    "eval_unit_cdf", "eval_unit_pdf", "evaluate", "m2_closed_pdf", "m2_log_pdf",
    "make_spec", "mms_spec", "moment", "parse_uv", "pdf", "pdf_interpolated_alpha",
    "quantile", "state_determinant_spec",
]
