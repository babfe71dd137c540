"""Real-valued special functions: log-gamma, signed gamma, Pochhammer,
digamma and the Gauss hypergeometric series.

Everything here works on plain Python floats.  Products of many gamma
values are carried as :class:`SignedLogValue` so that a large parameter
set never overflows before the final exponentiation.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

from .exceptions import ConvergenceError, DomainError, PoleError

#: A real closer than this to an integer is treated as that integer.
TOL_INT = 1e-9

DEFAULT_MAX_TERMS = 100_000

EULER_GAMMA = 0.5772156649015329

_LOG_PI = math.log(math.pi)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# zeta(k) - 1 for k = 2..31
_ZETA_M1 = (
    0.6449340668482264, 0.2020569031595943, 0.08232323371113819,
    0.03692775514336993, 0.01734306198444914, 0.008349277381922827,
    0.00407735619794434, 0.0020083928260822143, 0.0009945751278180853,
    0.0004941886041194645, 0.0002460865533080483, 0.00012271334757848915,
    6.124813505870483e-05, 3.058823630702049e-05, 1.528225940865187e-05,
    7.637197637899763e-06, 3.81729326499984e-06, 1.908212716553939e-06,
    9.539620338727962e-07, 4.769329867878064e-07, 2.38450502727733e-07,
    1.1921992596531106e-07, 5.960818905125948e-08, 2.980350351465228e-08,
    1.4901554828365043e-08, 7.45071178983543e-09, 3.725334024788457e-09,
    1.862659723513049e-09, 9.313274324196682e-10, 4.656629065033784e-10,
)

# B_2k / (2k (2k-1)) for the Stirling series of log-gamma
_STIRLING = (
    1.0 / 12.0, -1.0 / 360.0, 1.0 / 1260.0, -1.0 / 1680.0, 1.0 / 1188.0,
    -691.0 / 360360.0, 1.0 / 156.0, -3617.0 / 122400.0,
)

# B_2k / (2k) for the asymptotic series of digamma
_DIGAMMA_ASYM = (
    1.0 / 12.0, -1.0 / 120.0, 1.0 / 252.0, -1.0 / 240.0, 1.0 / 132.0,
    -691.0 / 32760.0, 1.0 / 12.0, -3617.0 / 8160.0,
)


def max_terms() -> int:
    """Series term cap; ``BETAPROD_MAX_TERMS`` overrides the default."""
    value = os.environ.get("BETAPROD_MAX_TERMS")
    return int(value) if value else DEFAULT_MAX_TERMS


def is_near_integer(x: float, tol: float = TOL_INT) -> bool:
    return abs(x - round(x)) < tol


@dataclass(frozen=True)
class SignedLogValue:
    """A real number stored as ``sign * exp(log_magnitude)``."""

    sign: int
    log_magnitude: float

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or +1, got {self.sign}")
        if (self.sign == 0) != (self.log_magnitude == -math.inf):
            raise ValueError("sign is 0 exactly when log_magnitude is -inf")

    @classmethod
    def from_float(cls, x: float) -> SignedLogValue:
        if x == 0:
            return cls(0, -math.inf)
        return cls(1 if x > 0 else -1, math.log(abs(x)))

    @classmethod
    def one(cls) -> SignedLogValue:
        return cls(1, 0.0)

    def __mul__(self, other: SignedLogValue) -> SignedLogValue:
        sign = self.sign * other.sign
        if sign == 0:
            return ZERO
        return SignedLogValue(sign, self.log_magnitude + other.log_magnitude)

    def __truediv__(self, other: SignedLogValue) -> SignedLogValue:
        if other.sign == 0:
            raise ZeroDivisionError("division by a zero SignedLogValue")
        if self.sign == 0:
            return ZERO
        return SignedLogValue(self.sign * other.sign,
                              self.log_magnitude - other.log_magnitude)

    def reciprocal(self) -> SignedLogValue:
        return SignedLogValue.one() / self

    def __float__(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_magnitude)

    value = __float__


ZERO = SignedLogValue(0, -math.inf)


def _log_gamma_1p(z: float) -> float:
    """log Gamma(1 + z) for |z| <= 1/2, accurate near the zero at z = 0."""
    s = 0.0
    zk = -z
    for k, zm1 in enumerate(_ZETA_M1, start=2):
        zk *= -z
        s += zm1 * zk / k
    return -math.log1p(z) + z * (1.0 - EULER_GAMMA) + s


def _stirling(x: float) -> float:
    inv = 1.0 / x
    inv2 = inv * inv
    acc = 0.0
    for coef in reversed(_STIRLING):
        acc = acc * inv2 + coef
    return (x - 0.5) * math.log(x) - x + _HALF_LOG_2PI + acc * inv


def log_gamma(x: float) -> float:
    """Natural log of Gamma(x) for x > 0."""
    x = float(x)
    if not x > 0:
        raise DomainError(f"log_gamma needs x > 0, got {x!r}; use gamma_signed")
    if x < 0.5:
        return _log_gamma_1p(x) - math.log(x)
    if x <= 1.5:
        return _log_gamma_1p(x - 1.0)
    if x <= 2.5:
        z = x - 2.0
        return math.log1p(z) + _log_gamma_1p(z)
    if x < 15.0:
        # shift down into [1.5, 2.5]
        k = int(math.floor(x - 1.5))
        prod = 1.0
        y = x
        for _ in range(k):
            y -= 1.0
            prod *= y
        z = y - 2.0
        return math.log(prod) + math.log1p(z) + _log_gamma_1p(z)
    return _stirling(x)


def gamma_signed(x: float) -> SignedLogValue:
    """Gamma(x) as a SignedLogValue; negative non-integers via reflection."""
    x = float(x)
    if x > 0:
        return SignedLogValue(1, log_gamma(x))
    n = round(x)
    if abs(x - n) < TOL_INT:
        raise PoleError(f"Gamma has a pole at {x!r}")
    # Gamma(x) Gamma(1-x) = pi / sin(pi x), with sin(pi x) = (-1)^n sin(pi (x-n))
    s = math.sin(math.pi * (x - n))
    if n % 2:
        s = -s
    sign = 1 if s > 0 else -1
    return SignedLogValue(sign, _LOG_PI - math.log(abs(s)) - log_gamma(1.0 - x))


def gamma(x: float) -> float:
    return float(gamma_signed(x))


def rgamma_signed(x: float) -> SignedLogValue:
    """1/Gamma(x), taken as exactly zero at the non-positive integers."""
    x = float(x)
    if x <= 0 and is_near_integer(x):
        return ZERO
    return gamma_signed(x).reciprocal()


def pochhammer(a: float, n: int) -> float:
    """Rising factorial (a)_n = a (a+1) ... (a+n-1)."""
    if n < 0:
        raise DomainError(f"pochhammer needs n >= 0, got {n}")
    result = 1.0
    for k in range(n):
        result *= a + k
    return result


def digamma(x: float) -> float:
    """psi(x) = d/dx log Gamma(x) for x > 0."""
    x = float(x)
    if not x > 0:
        raise DomainError(f"digamma needs x > 0, got {x!r}")
    shift = 0.0
    while x < 10.0:
        shift += 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    acc = 0.0
    for coef in reversed(_DIGAMMA_ASYM):
        acc = acc * inv2 + coef
    return math.log(x) - 0.5 / x - acc * inv2 - shift


def _2f1_direct(a, b, c, x, tol, cap):
    total = 1.0
    term = 1.0
    quiet = 0
    for n in range(cap):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * x
        total += term
        if term == 0.0:
            return total
        if abs(term) < tol * abs(total):
            quiet += 1
            if quiet == 3:
                return total
        else:
            quiet = 0
    raise ConvergenceError(
        f"2F1({a}, {b}; {c}; {x}) did not converge in {cap} terms", total)


def gauss_2f1(a: float, b: float, c: float, x: float, tol: float = 1e-15,
              max_terms_: int | None = None) -> float:
    """Gauss hypergeometric series 2F1(a, b; c; x) for 0 <= x < 1.

    When ``c - a - b < 0`` and ``x > 0.8`` the Euler transformation
    ``(1-x)^(c-a-b) 2F1(c-a, c-b; c; x)`` is summed instead, which restores
    decay of the summands.
    """
    if c <= 0 and is_near_integer(c):
        raise PoleError(f"2F1 lower parameter c={c} is a non-positive integer")
    if not 0.0 <= x < 1.0:
        raise DomainError(f"gauss_2f1 needs 0 <= x < 1, got {x!r}")
    cap = max_terms() if max_terms_ is None else max_terms_
    if x == 0.0:
        return 1.0
    if c - a - b < 0 and x > 0.8:
        return (1.0 - x) ** (c - a - b) * _2f1_direct(c - a, c - b, c, x, tol, cap)
    return _2f1_direct(a, b, c, x, tol, cap)
