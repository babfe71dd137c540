"""Density model: picks an expansion per x and serves pdf, cdf and quantiles.

Below the crossover point the origin expansion is used (or, for m = 2
specs where it does not exist, the closed/logarithmic 2F1 forms); at and
above it the (1-x) series.  Specs with integer u-differences and m > 2
have no origin expansion and fall back to the (1-x) series everywhere,
with a truncation estimate attached.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _quadrature
from .exceptions import ConvergenceError, DomainError, GenericityError
from .model import ProductSpec
from .series_origin import (
    OriginExpansion,
    build_origin,
    m2_closed_pdf,
    m2_log_params,
    m2_log_pdf,
    origin_cdf_with_error,
    origin_pdf_with_error,
)
from .series_unit import (
    UnitExpansion,
    build_unit,
    build_unit_for,
    unit_cdf_with_error,
    unit_pdf_with_error,
)
from .special_fn import TOL_INT, is_near_integer

log = logging.getLogger(__name__)

DEFAULT_CROSSOVER = 0.55
AUTO_SCAN = tuple(round(0.35 + 0.05 * i, 2) for i in range(8))   # 0.35 .. 0.70
CONTINUITY_TOL = 1e-7
# below this the 2F1 in (1-x) needs thousands of terms; switch to the log form
M2_LOG_BELOW = 0.05
# lowest x the (1-x) series is sized for when it must stand in for the origin series
UNIT_ONLY_XMIN = 0.05
DEFAULT_H = 1.0 / 64 + 1.0 / 1024


class M2Path(enum.Enum):
    NONE = "none"
    CLOSED = "closed"
    LOG = "log"


@dataclass(frozen=True)
class DensityModel:
    spec: ProductSpec
    origin: OriginExpansion | None
    unit: UnitExpansion
    crossover: float
    m2_path: M2Path
    tol: float
    diagnostics: tuple[str, ...] = ()

    @property
    def leading_exponents(self) -> tuple[float, float]:
        """Power-law exponents of the density at x = 0 and x = 1."""
        return min(self.spec.u) - 1.0, self.spec.delta - 1.0


def _mismatch(origin, unit, x):
    o, _ = origin_pdf_with_error(origin, x)
    u, _ = unit_pdf_with_error(unit, x)
    return float(abs(o - u) / abs(u))


def build_model(spec: ProductSpec, N: int | None = None,
                crossover: float | str = DEFAULT_CROSSOVER, tol: float = 1e-12,
                m2_path: M2Path | str | None = None) -> DensityModel:
    """Assemble both expansions for ``spec``.

    ``N`` fixes the number of (1-x) coefficients; by default enough are
    built to reach ``tol`` at the lowest x the series is asked to serve.
    ``crossover="auto"`` scans 0.35..0.70 for the smallest mismatch.
    """
    diags = []
    origin = None
    if spec.is_generic:
        origin = build_origin(spec)
        diags.extend(origin.dropped)
        if origin.ill_conditioned:
            diags.append("u-differences within 1e-6 of an integer: origin series "
                         f"used only below x={M2_LOG_BELOW}")
    else:
        diags.append(f"integer u-differences {spec.integer_pairs}: no origin series")

    if m2_path is None:
        path = M2Path.CLOSED if spec.m == 2 else M2Path.NONE
    else:
        path = M2Path(m2_path)
        if path is not M2Path.NONE and spec.m != 2:
            raise DomainError(f"m2 path requested for m={spec.m}")
        if path is M2Path.LOG and spec.is_generic:
            raise GenericityError("the logarithmic m=2 formula needs u2 - u1 integer")

    auto = crossover == "auto"
    xc = DEFAULT_CROSSOVER if auto else float(crossover)
    if not 0.0 < xc < 1.0:
        raise DomainError(f"crossover must lie in (0, 1), got {crossover}")

    usable_origin = origin is not None and not origin.ill_conditioned
    if usable_origin or (spec.m == 2 and origin is None):
        x_lo = min(xc, AUTO_SCAN[0])
    else:
        x_lo = UNIT_ONLY_XMIN
    unit = build_unit(spec, N) if N is not None else build_unit_for(spec, x_lo, tol)

    if usable_origin:
        if auto:
            xc = min(AUTO_SCAN, key=lambda p: _mismatch(origin, unit, p))
        else:
            gap = _mismatch(origin, unit, xc)
            if gap > CONTINUITY_TOL:
                best = min(AUTO_SCAN, key=lambda p: _mismatch(origin, unit, p))
                diags.append(f"pdf mismatch {gap:.2e} at crossover {xc}; moved to {best}")
                xc = best
        gap = _mismatch(origin, unit, xc)
        if gap > CONTINUITY_TOL:
            diags.append(f"pdf mismatch {gap:.2e} at crossover {xc} exceeds {CONTINUITY_TOL}")
    for d in diags:
        log.info("%s: %s", spec, d)
    return DensityModel(spec, origin, unit, xc, path, tol, tuple(diags))


# ---------------------------------------------------------------------------
# routing


def _region_masks(model: DensityModel, x: np.ndarray):
    """Label every interior x with the expansion that serves it."""
    regions = np.empty(x.shape, dtype=object)
    below = x < model.crossover
    regions[~below] = "unit"
    origin = model.origin
    if origin is not None and not origin.ill_conditioned:
        regions[below] = "origin"
    elif origin is not None:
        regions[below] = np.where(x[below] < M2_LOG_BELOW, "origin", "unit")
    elif model.m2_path is M2Path.LOG:
        regions[below] = "m2log"
    elif model.m2_path is M2Path.CLOSED:
        regions[below] = np.where(x[below] < M2_LOG_BELOW, "m2log", "m2closed")
    else:
        regions[below] = "unit"
    return regions


def _m2_scalar_pdf(model: DensityModel, region: str, x: float) -> float:
    if region == "m2log":
        u1, n, v1, v2 = m2_log_params(model.spec)
        return m2_log_pdf(u1, n, v1, v2, x)
    return m2_closed_pdf(model.spec, x)


def _interior_pdf(model: DensityModel, x: np.ndarray):
    regions = _region_masks(model, x)
    value = np.empty_like(x)
    err = np.zeros_like(x)
    for region in set(regions.tolist()):
        sel = regions == region
        if region == "origin":
            value[sel], err[sel] = origin_pdf_with_error(model.origin, x[sel], model.tol)
        elif region == "unit":
            value[sel], err[sel] = unit_pdf_with_error(model.unit, x[sel])
        else:
            value[sel] = [_m2_scalar_pdf(model, region, xi) for xi in x[sel]]
            err[sel] = model.tol * np.abs(value[sel])
    return value, regions, err


def _pdf_at_zero(model: DensityModel):
    u_min = min(model.spec.u)
    if u_min > 1.0 + TOL_INT:
        return 0.0
    if u_min < 1.0 - TOL_INT:
        return math.inf
    # u_min == 1: the branch constant of the x^0 term
    at_one = [u for u in model.spec.u if is_near_integer(u - 1.0, TOL_INT) and abs(u - 1) < 0.5]
    if len(at_one) > 1:
        return math.inf         # merged branches give a -log x term
    if model.origin is not None:
        for br in model.origin.branches:
            if abs(br.u - 1.0) < TOL_INT:
                return float(br.leading)
        return 0.0
    if model.spec.m == 2:
        u1, n, v1, v2 = m2_log_params(model.spec)
        return m2_log_pdf(u1, n, v1, v2, 1e-300)
    value, _ = unit_pdf_with_error(model.unit, np.array([1e-300]))
    return float(value[0])


def evaluate(model: DensityModel, x, kind: str = "pdf"):
    """Values, region labels and truncation estimates at ``x``.

    ``kind`` is "pdf" or "cdf".  Returns three arrays shaped like ``x``.
    """
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any((xa < 0) | (xa > 1)) or np.any(np.isnan(xa)):
        raise DomainError("x must lie in [0, 1]")
    value = np.empty_like(xa)
    err = np.zeros_like(xa)
    regions = np.empty(xa.shape, dtype=object)
    zero, one = xa == 0.0, xa == 1.0
    inner = ~(zero | one)
    if kind == "pdf":
        if np.any(inner):
            value[inner], regions[inner], err[inner] = _interior_pdf(model, xa[inner])
        value[zero] = _pdf_at_zero(model) if np.any(zero) else 0.0
        regions[zero] = "origin"
        if np.any(one):
            value[one], err[one] = unit_pdf_with_error(model.unit, xa[one])
        regions[one] = "unit"
    elif kind == "cdf":
        if np.any(inner):
            value[inner], regions[inner], err[inner] = _interior_cdf(model, xa[inner])
        value[zero], regions[zero] = 0.0, "origin"
        value[one], regions[one] = 1.0, "unit"
    else:
        raise ValueError(f"kind must be 'pdf' or 'cdf', got {kind!r}")
    shape = np.shape(x)
    return value.reshape(shape), regions.reshape(shape), err.reshape(shape)


def _m2_cdf(model: DensityModel, x: float, region: str):
    u_min = min(model.spec.u)

    def f(t):
        return np.array([_m2_scalar_pdf(model, "m2log" if ti < M2_LOG_BELOW else region, ti)
                         for ti in t])
    return _quadrature.integrate(f, 0.0, x, u_min - 1.0, 0.0, tol=model.tol, n_start=16)


def _interior_cdf(model: DensityModel, x: np.ndarray):
    regions = _region_masks(model, x)
    value = np.empty_like(x)
    err = np.zeros_like(x)
    for region in set(regions.tolist()):
        sel = regions == region
        if region == "origin":
            value[sel], err[sel] = origin_cdf_with_error(model.origin, x[sel], model.tol)
        elif region == "unit":
            value[sel], err[sel] = unit_cdf_with_error(model.unit, x[sel])
        else:
            pairs = [_m2_cdf(model, xi, region) for xi in x[sel]]
            value[sel] = [p[0] for p in pairs]
            err[sel] = [p[1] for p in pairs]
    return value, regions, err


def pdf(model: DensityModel, x):
    """Density at x in [0, 1]; ``inf`` marks an integrable singularity."""
    value, _, _ = evaluate(model, x, "pdf")
    return value[()] if np.ndim(value) == 0 else value


def cdf(model: DensityModel, x):
    value, _, _ = evaluate(model, x, "cdf")
    value = np.clip(value, 0.0, 1.0)
    return value[()] if np.ndim(value) == 0 else value


def quantile(model: DensityModel, p: float, xtol: float = 1e-12,
             ptol: float = 1e-10) -> float:
    """x with cdf(x) = p, by bisection (pdf may be unbounded at 0).

    Stops once the bracket is narrower than ``xtol`` and the cdf is within
    ``ptol`` of p, or when the bracket can no longer be split.  Both are
    needed: near an x^(u-1) singularity a tiny bracket can still span a
    large change in the cdf.
    """
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must lie in (0, 1), got {p}")
    lo, hi = 0.0, 1.0
    while True:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            return mid
        value = cdf(model, mid)
        if hi - lo <= xtol and abs(value - p) <= ptol:
            return mid
        if value < p:
            lo = mid
        else:
            hi = mid


def pdf_interpolated_alpha(family: Callable[[float], ProductSpec], alpha0: float,
                           h: float = DEFAULT_H, x=0.5, tol: float = 1e-12,
                           max_retries: int = 3):
    """Density at ``alpha0`` from origin-series densities at alpha0 +- h, +- 2h.

    f(a0) ~ 2/3 (f(a0+h) + f(a0-h)) - 1/6 (f(a0+2h) + f(a0-2h)), error O(h^4).
    Useful when the spec at ``alpha0`` itself has integer u-differences.
    If a perturbed spec is still non-generic, h is rescaled by an
    irrational factor and the attempt repeated (at most ``max_retries`` times).
    """
    step = h
    for attempt in range(max_retries + 1):
        specs = [family(alpha0 + k * step) for k in (1, -1, 2, -2)]
        if all(s.is_generic for s in specs):
            vals = [np.asarray(origin_pdf_with_error(build_origin(s), x, tol)[0])
                    for s in specs]
            out = 2.0 / 3.0 * (vals[0] + vals[1]) - 1.0 / 6.0 * (vals[2] + vals[3])
            return out[()] if np.ndim(out) == 0 else out
        if attempt < max_retries:
            log.info("h=%g hits an integer-difference spec; retrying", step)
            step *= (math.sqrt(5.0) - 1.0)
    raise GenericityError(
        f"no generic perturbation found around alpha={alpha0} after {max_retries} retries")
