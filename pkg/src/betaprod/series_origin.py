"""Expansion of the product density near x = 0.

For a generic spec (no two ``u`` differing by an integer) the density is a
sum of m branches

    f(x) = sum_k A_k x^(u_k - 1) sum_n prod_i (1 + u_k - v_i)_n / (1 + u_k - u_i)_n x^n

with ``A_k = prod_i Gamma(v_i)/Gamma(u_i) / Gamma(v_k - u_k)
* prod_{j != k} Gamma(u_j - u_k) / Gamma(v_j - u_k)``.

For m = 2 there is also a single-2F1 closed form in the variable 1 - x
which needs no genericity, and an explicit logarithmic formula for the
case u_2 = u_1 + n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ConvergenceError, DomainError, GenericityError, PoleError
from .model import ProductSpec
from .special_fn import (
    SignedLogValue,
    digamma,
    gamma_signed,
    gauss_2f1,
    is_near_integer,
    log_gamma,
    max_terms,
    rgamma_signed,
)

DEFAULT_TOL = 1e-12
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class OriginBranch:
    exponent: float
    leading: SignedLogValue
    num_shifts: tuple[float, ...]
    den_shifts: tuple[float, ...]

    @property
    def u(self) -> float:
        return self.exponent + 1.0


@dataclass(frozen=True)
class OriginExpansion:
    spec: ProductSpec
    branches: tuple[OriginBranch, ...]
    # branches whose constant is exactly zero (1/Gamma at a pole)
    dropped: tuple[str, ...] = ()
    ill_conditioned: bool = False


def _log_prefactor(spec: ProductSpec) -> float:
    return math.fsum(log_gamma(f.v) - log_gamma(f.u) for f in spec.factors)


def build_origin(spec: ProductSpec) -> OriginExpansion:
    """Branch exponents, constants and term-ratio parameters for ``spec``."""
    if not spec.is_generic:
        raise GenericityError(
            f"{spec} has integer u-differences at index pairs {spec.integer_pairs}; "
            "use the unit series or the m=2 logarithmic formula")
    us, vs = spec.u, spec.v
    pre = SignedLogValue(1, _log_prefactor(spec))
    branches = []
    dropped = []
    for k, uk in enumerate(us):
        lead = pre * rgamma_signed(vs[k] - uk)
        for j in range(spec.m):
            if j == k:
                continue
            lead = lead * gamma_signed(us[j] - uk) * rgamma_signed(vs[j] - uk)
        if lead.sign == 0:
            dropped.append(f"branch u={uk:g}: constant vanishes (1/Gamma at a pole)")
            continue
        branches.append(OriginBranch(
            exponent=uk - 1.0,
            leading=lead,
            num_shifts=tuple(uk - v + 1.0 for v in vs),
            den_shifts=tuple(uk - u + 1.0 for u in us),
        ))
    return OriginExpansion(spec, tuple(branches), tuple(dropped), spec.ill_conditioned)


def _branch_series(branch: OriginBranch, x: np.ndarray, tol: float, integrate: bool):
    """Sum_n t_n x^n (or Sum_n t_n x^n / (u + n) when integrating).

    Returns the sum and the magnitude of the last term kept.  Terms shrink
    roughly like x^n, so the stopping test allows for a tail of about
    term / (1 - x).
    """
    u = branch.u
    rel = tol * (1.0 - x)
    coef = np.ones_like(x)          # t_n x^n
    total = coef / u if integrate else coef.copy()
    quiet = 0
    cap = max_terms()
    term = total
    for n in range(1, cap + 1):
        ratio = 1.0
        for a in branch.num_shifts:
            ratio *= a + n - 1
        for b in branch.den_shifts:
            ratio /= b + n - 1
        coef = coef * (ratio * x)
        term = coef / (u + n) if integrate else coef
        total = total + term
        small = np.abs(term) <= rel * np.abs(total)
        if np.all(small):
            quiet += 1
            if quiet == 3:
                return total, np.abs(term)
        else:
            quiet = 0
    raise ConvergenceError(
        f"origin branch u={u:g} did not converge in {cap} terms "
        f"(max x = {float(np.max(x)):g})", total)


def _eval_origin(exp: OriginExpansion, x, tol: float, integrate: bool):
    xa = np.asarray(x, dtype=float)
    flat = np.atleast_1d(xa).ravel()
    if np.any((flat <= 0) | (flat >= 1)):
        raise DomainError("origin series needs 0 < x < 1")
    logx = np.log(flat)
    scales = [br.leading.sign * np.exp(br.leading.log_magnitude
                                       + (br.u if integrate else br.exponent) * logx)
              for br in exp.branches]

    def total(branch_tol):
        value = np.zeros_like(flat)
        size = np.zeros_like(flat)
        err = np.zeros_like(flat)
        for br, scale in zip(exp.branches, scales):
            s, last = _branch_series(br, flat, branch_tol, integrate)
            value += scale * s
            size += np.abs(scale * s)
            err += np.abs(scale) * last / (1.0 - flat)
        return value, size, err

    value, size, err = total(tol)
    # branches of opposite sign cancel: truncate relative to the sum, not each branch
    kappa = float(np.max(size / np.maximum(np.abs(value), 1e-300)))
    if kappa > 2.0:
        value, size, err = total(max(tol / kappa, 1e-30))
    err = err + _EPS * size
    return value.reshape(xa.shape), err.reshape(xa.shape)


def eval_origin_pdf(exp: OriginExpansion, x, tol: float = DEFAULT_TOL):
    """Density from the origin expansion; ``x`` may be a scalar or array."""
    value, _ = _eval_origin(exp, x, tol, integrate=False)
    return value[()] if np.ndim(value) == 0 else value


def eval_origin_cdf(exp: OriginExpansion, x, tol: float = DEFAULT_TOL):
    """CDF by termwise integration, int_0^x t^(u+n-1) dt = x^(u+n)/(u+n)."""
    value, _ = _eval_origin(exp, x, tol, integrate=True)
    return value[()] if np.ndim(value) == 0 else value


def origin_pdf_with_error(exp: OriginExpansion, x, tol: float = DEFAULT_TOL):
    return _eval_origin(exp, x, tol, integrate=False)


def origin_cdf_with_error(exp: OriginExpansion, x, tol: float = DEFAULT_TOL):
    return _eval_origin(exp, x, tol, integrate=True)


# ---------------------------------------------------------------------------
# m = 2


def _m2_params(spec: ProductSpec):
    if spec.m != 2:
        raise DomainError(f"m=2 formula called with m={spec.m}")
    (u1, v1), (u2, v2) = ((f.u, f.v) for f in spec.factors)
    # label so that u2 >= u1: the 2F1 below then stays bounded as x -> 0
    if u2 < u1:
        u1, v1, u2, v2 = u2, v2, u1, v1
    return u1, v1, u2, v2


def m2_closed_pdf(spec: ProductSpec, x: float, tol: float = 1e-15) -> float:
    """Density of a two-factor product via one 2F1 in 1 - x.

    f(x) = G(v1)G(v2) / (G(u1)G(u2)G(delta)) x^(u1-1) (1-x)^(delta-1)
           * 2F1(v2-u2, v1-u2; delta; 1-x)
    """
    u1, v1, u2, v2 = _m2_params(spec)
    if not 0.0 < x < 1.0:
        raise DomainError(f"m2_closed_pdf needs 0 < x < 1, got {x}")
    delta = spec.delta
    logc = (log_gamma(v1) + log_gamma(v2) - log_gamma(u1) - log_gamma(u2)
            - log_gamma(delta))
    hyp = gauss_2f1(v2 - u2, v1 - u2, delta, 1.0 - x, tol=tol)
    return math.exp(logc + (u1 - 1.0) * math.log(x) + (delta - 1.0) * math.log1p(-x)) * hyp


def m2_log_pdf(u1: float, n: int, v1: float, v2: float, x: float,
               tol: float = 1e-15) -> float:
    """Density of the product with factors (u1, v1) and (u1 + n, v2).

    Used when the two u's differ by the integer ``n``, where the two
    origin branches merge and a ``log x`` term appears.
    """
    if n < 0 or int(n) != n:
        raise DomainError(f"n must be a non-negative integer, got {n}")
    n = int(n)
    if not 0.0 < x < 1.0:
        raise DomainError(f"m2_log_pdf needs 0 < x < 1, got {x}")
    a2, a1 = v2 - u1, v1 - u1      # v_i - u1: arguments of Gamma and psi
    for a in (a2, a1):
        if a <= 0 and is_near_integer(a):
            raise PoleError(
                f"v_i - u1 = {a:g} puts a pole in both Gamma and psi; "
                "use m2_closed_pdf")
        if a <= 0:
            raise DomainError(f"v_i - u1 = {a:g} must be positive")
    delta = v1 + v2 - 2.0 * u1 - n
    common = (SignedLogValue(1, log_gamma(v1) + log_gamma(v2) - log_gamma(u1)
                             - log_gamma(u1 + n)))
    k1 = common / (gamma_signed(a2) * gamma_signed(a1))
    k2 = common * rgamma_signed(a2 - n) * rgamma_signed(a1 - n)
    lx = math.log(x)
    ends = (delta - 1.0) * math.log1p(-x)

    # finite sum
    finite = 0.0
    for k in range(n):
        finite += (math.factorial(n - k - 1) / math.factorial(k)
                   * _poch(a2 - n, k) * _poch(a1 - n, k) * (-x) ** k)
    total = float(k1) * math.exp((u1 - 1.0) * lx + ends) * finite

    if k2.sign != 0:
        sign_n = -1.0 if n % 2 else 1.0
        scale = sign_n * float(k2) * math.exp((u1 + n - 1.0) * lx + ends)
        log_part = (-lx) / math.factorial(n) * gauss_2f1(a2, a1, n + 1.0, x, tol=tol)
        total += scale * (log_part + _psi_series(a2, a1, n, x, tol))
    return total


def _poch(a: float, k: int) -> float:
    r = 1.0
    for i in range(k):
        r *= a + i
    return r


def _psi_series(a2, a1, n, x, tol):
    """sum_k (a2)_k (a1)_k / (k! (n+k)!) {psi(k+1) + psi(n+k+1) - psi(a2+k) - psi(a1+k)} x^k"""
    coef = 1.0 / math.factorial(n)
    p1, pn = digamma(1.0), digamma(n + 1.0)
    q2, q1 = digamma(a2), digamma(a1)
    total = coef * (p1 + pn - q2 - q1)
    quiet = 0
    cap = max_terms()
    for k in range(1, cap + 1):
        # advance psi(z) -> psi(z+1) = psi(z) + 1/z
        p1 += 1.0 / k
        pn += 1.0 / (n + k)
        q2 += 1.0 / (a2 + k - 1)
        q1 += 1.0 / (a1 + k - 1)
        coef *= (a2 + k - 1) * (a1 + k - 1) / (k * (n + k)) * x
        term = coef * (p1 + pn - q2 - q1)
        total += term
        if coef == 0.0:
            return total
        if abs(term) <= tol * abs(total):
            quiet += 1
            if quiet == 3:
                return total
        else:
            quiet = 0
    raise ConvergenceError(f"digamma series did not converge in {cap} terms", total)


def m2_log_params(spec: ProductSpec):
    """Map an integer-difference m=2 spec onto ``(u1, n, v1, v2)``."""
    u1, v1, u2, v2 = _m2_params(spec)
    n = round(u2 - u1)
    if not is_near_integer(u2 - u1):
        raise GenericityError(f"{spec}: u2 - u1 = {u2 - u1:g} is not an integer")
    return u1, n, v1, v2
