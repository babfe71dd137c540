"""Expansion of the product density near x = 1.

    f(x) = A (1-x)^(delta-1) {1 + sum_{n>=1} c_n (1-x)^n},
    A = prod_i Gamma(v_i)/Gamma(u_i) / Gamma(delta)

The coefficients follow an (m+1)-term recurrence whose coefficients are
built from the polynomials

    p(c) = prod_i (c + 1 - u_i),   q(c) = prod_i (c + 2 - v_i),
    q1(c) = (1 + c) q(c) - c q(c - 1)

and their backward differences ``nabla g(c) = g(c) - g(c - 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb, factorial
from typing import Callable

import numpy as np

from .exceptions import ConvergenceError, DomainError
from .model import ProductSpec
from .special_fn import TOL_INT, SignedLogValue, log_gamma

DEFAULT_N = 64
DEFAULT_TOL = 1e-12


# ---------------------------------------------------------------------------
# polynomials and differences


def poly_p(spec: ProductSpec, c):
    out = 1.0
    for u in spec.u:
        out = out * (c + 1.0 - u)
    return out


def poly_q(spec: ProductSpec, c):
    out = 1.0
    for v in spec.v:
        out = out * (c + 2.0 - v)
    return out


def poly_q1(spec: ProductSpec, c):
    return (1.0 + c) * poly_q(spec, c) - c * poly_q(spec, c - 1.0)


def nabla_k(f: Callable, c, k: int):
    """k-th backward difference sum_j (-1)^j C(k, j) f(c - j)."""
    if k < 0:
        raise DomainError(f"difference order must be >= 0, got {k}")
    return sum((-1) ** j * comb(k, j) * f(c - j) for j in range(k + 1))


def _taylor_of_product(shifts, center):
    """Coefficients in h of prod_j (center + shift_j + h), lowest first."""
    coefs = [np.ones_like(center)]
    for s in shifts:
        w = center + s
        new = [coefs[0] * w]
        for i in range(1, len(coefs)):
            new.append(coefs[i] * w + coefs[i - 1])
        new.append(coefs[-1])
        coefs = new
    return coefs


def _nabla_taylor(coefs):
    # g(h) = H(h) - H(h-1): g_i = sum_{l>i} (-1)^(l-i+1) C(l, i) H_l
    deg = len(coefs) - 1
    out = []
    for i in range(deg):
        acc = 0.0
        for l in range(i + 1, deg + 1):
            acc = acc + (-1) ** (l - i + 1) * comb(l, i) * coefs[l]
        out.append(acc)
    return out or [np.zeros_like(coefs[0])]


def r_prime(spec: ProductSpec, k: int, gamma):
    """R'_k(gamma) = nabla^k p(gamma) / k! - nabla^k q1(gamma) / (k+1)!.

    Evaluated from Taylor coefficients of p and q about ``gamma``: the
    differences are then taken coefficient-wise, which avoids the
    cancellation of differencing values of size gamma^m when gamma is large.
    """
    m = spec.m
    if not 0 <= k <= m - 1:
        raise IndexError(f"R'_k defined for 0 <= k <= {m - 1}, got k={k}")
    g = np.asarray(gamma)
    if g.dtype != np.longdouble:
        g = g.astype(float)
    pc = _taylor_of_product([1.0 - u for u in spec.u], g)
    qc = _taylor_of_product([2.0 - v for v in spec.v], g)
    # q1(h) = q(h) + (gamma + h) nabla q(h)
    dq = _nabla_taylor(qc)
    q1c = list(qc)
    for i, d in enumerate(dq):
        q1c[i] = q1c[i] + g * d
        q1c[i + 1] = q1c[i + 1] + d
    for _ in range(k):
        pc = _nabla_taylor(pc)
        q1c = _nabla_taylor(q1c)
    out = pc[0] / factorial(k) - q1c[0] / factorial(k + 1)
    return out[()] if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# expansion


@dataclass(frozen=True)
class UnitExpansion:
    spec: ProductSpec
    prefactor: SignedLogValue
    delta: float
    coeffs: np.ndarray

    @property
    def N(self) -> int:
        return len(self.coeffs) - 1


def unit_prefactor(spec: ProductSpec) -> SignedLogValue:
    logs = math.fsum(log_gamma(f.v) - log_gamma(f.u) for f in spec.factors)
    return SignedLogValue(1, logs - log_gamma(spec.delta))


def _falling_block(n: int, delta: float, k: int) -> float:
    """(-n-delta+1)_k, asserting every factor magnitude is at least delta."""
    out = 1
    for j in range(k):
        factor = -n - delta + 1 + j
        assert -factor >= delta * (1 - 1e-12), (n, k, delta)
        out *= factor
    return out


def build_unit(spec: ProductSpec, N: int = DEFAULT_N) -> UnitExpansion:
    """Coefficients c_0..c_N of the (1-x) expansion, c_0 = 1."""
    if N < 0:
        raise DomainError(f"N must be >= 0, got {N}")
    m, delta = spec.m, spec.delta
    # extended precision where the platform has it: the recurrence is a
    # near-cancelling combination and loses ~log10(n) digits as n grows
    ns = np.arange(1, N + 1, dtype=np.longdouble)
    delta = np.longdouble(delta)
    # rp[k][n-1] = R'_{m-1-k}(n - k + delta - 1)
    rp = {k: (r_prime(spec, m - 1 - k, ns - k + delta - 1.0) if N else np.empty(0))
          for k in range(1, m)}
    qv = poly_q(spec, ns - m + delta - 1.0) if N else np.empty(0)
    c = np.empty(N + 1, dtype=np.longdouble)
    c[0] = 1.0
    for n in range(1, N + 1):
        acc = np.longdouble(0.0)
        for k in range(1, min(m - 1, n) + 1):
            acc += rp[k][n - 1] * c[n - k] / _falling_block(n, delta, k)
        if n >= m:
            acc += qv[n - 1] * c[n - m] / _falling_block(n, delta, m - 1)
        c[n] = acc / n
    coeffs = c.astype(float)
    coeffs.flags.writeable = False
    return UnitExpansion(spec, unit_prefactor(spec), spec.delta, coeffs)


def _horner(coeffs, t):
    acc = np.zeros_like(t)
    for cn in coeffs[::-1]:
        acc = acc * t + cn
    return acc


def _tail(coeffs, t):
    n_last = len(coeffs) - 1
    if n_last < 1:
        return np.zeros_like(t)
    cn, cprev = abs(coeffs[-1]), abs(coeffs[-2])
    last = cn * t ** n_last
    if cprev > 0:
        r = np.clip(cn / cprev * t, 0.0, 0.99)
    else:
        r = np.where(t > 0, 0.99, 0.0)
    return last * r / (1.0 - r)


def _endpoint_power(delta, t):
    # (1-x)^(delta-1); delta = 1 is taken literally so that 0^0 never arises
    out = np.ones_like(t)
    if abs(delta - 1.0) < TOL_INT:
        return out
    pos = t > 0
    out[pos] = t[pos] ** (delta - 1.0)
    out[~pos] = np.inf if delta < 1.0 else 0.0
    return out


def unit_pdf_with_error(exp: UnitExpansion, x):
    """Density and estimated truncation error (absolute)."""
    xa = np.asarray(x, dtype=float)
    if np.any((xa <= 0) | (xa > 1)):
        raise DomainError("unit series needs 0 < x <= 1")
    return unit_pdf_from_gap(exp, 1.0 - xa)


def unit_pdf_from_gap(exp: UnitExpansion, gap):
    """Density at x = 1 - gap, with gap given directly.

    Near x = 1 the distance to 1 is not representable through x itself;
    quadrature in the gap variable needs this form.
    """
    ga = np.asarray(gap, dtype=float)
    if np.any((ga < 0) | (ga >= 1)):
        raise DomainError("unit series needs 0 <= 1 - x < 1")
    t = np.atleast_1d(ga).astype(float)
    a = float(exp.prefactor)
    power = _endpoint_power(exp.delta, t)
    finite = np.isfinite(power)
    value = np.full_like(t, np.inf)
    err = np.zeros_like(t)
    value[finite] = a * power[finite] * _horner(exp.coeffs, t[finite])
    err[finite] = a * power[finite] * _tail(exp.coeffs, t[finite])
    return value.reshape(ga.shape), err.reshape(ga.shape)


def unit_cdf_with_error(exp: UnitExpansion, x):
    """CDF as 1 - A sum_n c_n (1-x)^(delta+n) / (delta+n), and its error."""
    xa = np.asarray(x, dtype=float)
    if np.any((xa <= 0) | (xa > 1)):
        raise DomainError("unit series needs 0 < x <= 1")
    t = 1.0 - xa
    d = exp.delta
    scaled = exp.coeffs / (d + np.arange(len(exp.coeffs)))
    a = float(exp.prefactor)
    tpow = np.power(t, d)
    value = 1.0 - a * tpow * _horner(scaled, t)
    err = a * tpow * _tail(scaled, t)
    return value, err


def _check(value, err, tol, what):
    bad = err > tol * np.maximum(np.abs(value), 1e-300)
    if np.any(bad):
        raise ConvergenceError(
            f"{what}: {np.count_nonzero(bad)} point(s) need more than the available "
            "coefficients; rebuild with larger N or use the origin series", value)


def eval_unit_pdf(exp: UnitExpansion, x, tol: float = DEFAULT_TOL):
    value, err = unit_pdf_with_error(exp, x)
    _check(value, err, tol, "unit pdf")
    return value[()] if np.ndim(value) == 0 else value


def eval_unit_cdf(exp: UnitExpansion, x, tol: float = DEFAULT_TOL):
    value, err = unit_cdf_with_error(exp, x)
    _check(value, err, tol, "unit cdf")
    return value[()] if np.ndim(value) == 0 else value


def converged_at(exp: UnitExpansion, x: float, tol: float) -> bool:
    """True when the tail estimate at ``x`` is within ``tol`` (relative)."""
    value, err = unit_pdf_with_error(exp, x)
    return bool(np.all(err <= tol * np.abs(value)))


def build_unit_for(spec: ProductSpec, x_min: float, tol: float = DEFAULT_TOL,
                   n_start: int = DEFAULT_N, n_cap: int = 1 << 16) -> UnitExpansion:
    """Double N until the series reaches ``tol`` at ``x_min`` (or N hits n_cap)."""
    n = n_start
    while True:
        exp = build_unit(spec, n)
        if converged_at(exp, x_min, tol) or n >= n_cap:
            return exp
        n = min(2 * n, n_cap)
