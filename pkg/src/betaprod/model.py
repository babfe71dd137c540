"""Product specifications: which Beta factors are multiplied together.

A factor ``(u, v)`` with ``0 < u < v`` is a Beta(u, v - u) variable with
moments ``(u)_n / (v)_n``.  The product of independent factors has the
product of the moment sequences.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from .exceptions import DomainError, ValidationError
from .special_fn import TOL_INT, log_gamma

#: Differences this close to an integer make the origin expansion
#: numerically fragile even though it is formally defined.
ILL_CONDITIONED_TOL = 1e-6


class Genericity(enum.Enum):
    GENERIC = "generic"
    INTEGER_DIFFERENCE = "integer-difference"


@dataclass(frozen=True)
class BetaFactor:
    u: float
    v: float

    def __post_init__(self):
        if not (math.isfinite(self.u) and math.isfinite(self.v)):
            raise ValidationError(f"non-finite factor parameters ({self.u}, {self.v})")
        if not self.u > 0:
            raise ValidationError(f"factor (u={self.u}, v={self.v}) needs u > 0")
        if not self.v > self.u:
            raise ValidationError(f"factor (u={self.u}, v={self.v}) needs v > u")


@dataclass(frozen=True)
class ProductSpec:
    """An ordered, validated list of Beta factors.

    ``integer_pairs`` lists the (0-based) index pairs ``(i, j)`` whose
    ``u`` values differ by an integer; it is empty exactly when the
    spec is generic.
    """

    factors: tuple[BetaFactor, ...]
    delta: float = field(init=False)
    genericity: Genericity = field(init=False)
    integer_pairs: tuple[tuple[int, int], ...] = field(init=False)
    ill_conditioned: bool = field(init=False)

    def __post_init__(self):
        if not self.factors:
            raise ValidationError("a product needs at least one factor")
        us = [f.u for f in self.factors]
        pairs = []
        fragile = False
        for i, j in combinations(range(len(us)), 2):
            d = us[i] - us[j]
            dist = abs(d - round(d))
            if dist < TOL_INT:
                pairs.append((i, j))
            elif dist < ILL_CONDITIONED_TOL:
                fragile = True
        object.__setattr__(self, "delta", math.fsum(f.v - f.u for f in self.factors))
        object.__setattr__(self, "integer_pairs", tuple(pairs))
        object.__setattr__(
            self, "genericity",
            Genericity.INTEGER_DIFFERENCE if pairs else Genericity.GENERIC)
        object.__setattr__(self, "ill_conditioned", fragile)

    @property
    def m(self) -> int:
        return len(self.factors)

    @property
    def u(self) -> tuple[float, ...]:
        return tuple(f.u for f in self.factors)

    @property
    def v(self) -> tuple[float, ...]:
        return tuple(f.v for f in self.factors)

    @property
    def is_generic(self) -> bool:
        return self.genericity is Genericity.GENERIC

    def __str__(self):
        inner = ", ".join(f"({f.u:g}, {f.v:g})" for f in self.factors)
        return f"ProductSpec[{inner}]"


def make_spec(pairs: Iterable[Sequence[float]]) -> ProductSpec:
    """Build a ProductSpec from ``(u, v)`` pairs."""
    factors = []
    for idx, pair in enumerate(pairs):
        u, v = pair
        try:
            factors.append(BetaFactor(float(u), float(v)))
        except ValidationError as exc:
            raise ValidationError(f"factor {idx + 1}: {exc}") from None
    if not factors:
        raise ValidationError("empty factor list")
    return ProductSpec(tuple(factors))


def parse_uv(u_text: str, v_text: str) -> ProductSpec:
    """Parse comma separated ``u`` and ``v`` lists, e.g. ``"0.25,0.5"``."""
    try:
        us = [float(s) for s in u_text.split(",") if s.strip()]
        vs = [float(s) for s in v_text.split(",") if s.strip()]
    except ValueError as exc:
        raise ValidationError(f"cannot parse parameter list: {exc}") from None
    if len(us) != len(vs):
        raise ValidationError(f"--u has {len(us)} entries but --v has {len(vs)}")
    return make_spec(zip(us, vs))


def log_moment(spec: ProductSpec, n: int) -> float:
    if n < 0:
        raise DomainError(f"moment order must be >= 0, got {n}")
    if n <= 64:
        return math.fsum(
            math.log((f.u + k) / (f.v + k)) for f in spec.factors for k in range(n))
    return math.fsum(
        log_gamma(f.u + n) - log_gamma(f.u) - log_gamma(f.v + n) + log_gamma(f.v)
        for f in spec.factors)


def moment(spec: ProductSpec, n: int) -> float:
    """E[X^n] = prod_j (u_j)_n / (v_j)_n."""
    return math.exp(log_moment(spec, n))


def state_determinant_spec(alpha: float) -> ProductSpec:
    """Family with moments (1)_n (a+1)_n (2a+1)_n / ((3a+5/4)_n (3a+3/2)_n (3a+7/4)_n).

    alpha = 1/2, 1, 2 correspond to real, complex and quaternionic
    4x4 density matrices (the variable is 256 times the determinant).
    """
    if not alpha > 0:
        raise DomainError(f"alpha must be > 0, got {alpha}")
    a = float(alpha)
    spec = make_spec([
        (1.0, 3 * a + 1.25),
        (a + 1.0, 3 * a + 1.5),
        (2 * a + 1.0, 3 * a + 1.75),
    ])
    assert abs(spec.delta - (6 * a + 1.5)) <= 1e-12 * (6 * a + 1.5)
    return spec


def mms_spec() -> ProductSpec:
    """The m = 3 product arising from 108 * prod_{i<j} (x_i - x_j)^2 on S^3."""
    return make_spec([(0.25, 5.0 / 6.0), (0.5, 1.0), (0.75, 7.0 / 6.0)])
