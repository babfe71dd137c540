"""Brute-force references used to check the series expansions.

Nothing in here calls the expansions: sampling works from the factor
form, the convolution integrates Beta densities directly, and the moment
and integral-identity checks are plain quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _quadrature
from .exceptions import ConvergenceError, DomainError
from .model import BetaFactor, ProductSpec
from .special_fn import gauss_2f1, log_gamma


@dataclass(frozen=True)
class SampleBatch:
    values: np.ndarray      # sorted ascending
    seed: int
    count: int

    def to_text(self) -> str:
        """One value per line, 17 significant digits."""
        return "".join(f"{v:.17g}\n" for v in self.values)


def sample_product(spec: ProductSpec, count: int, seed: int, streams: int = 1) -> SampleBatch:
    """Draw ``count`` products of independent Beta(u_i, v_i - u_i) variates.

    Each Beta variate is G1 / (G1 + G2) with G1 ~ Gamma(u), G2 ~ Gamma(v - u).
    The count is split over ``streams`` independent substreams spawned from
    ``seed``; the result depends only on (seed, count, streams).
    """
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    children = np.random.SeedSequence(seed).spawn(streams)
    sizes = [count // streams + (i < count % streams) for i in range(streams)]
    parts = []
    for child, size in zip(children, sizes):
        rng = np.random.default_rng(child)
        prod = np.ones(size)
        for f in spec.factors:
            g1 = rng.standard_gamma(f.u, size)
            g2 = rng.standard_gamma(f.v - f.u, size)
            total = g1 + g2
            prod *= np.divide(g1, total, out=np.zeros(size), where=total > 0)
        parts.append(prod)
    values = np.sort(np.concatenate(parts))
    values.flags.writeable = False
    return SampleBatch(values, seed, count)


def _log_beta_fn(a: float, b: float) -> float:
    # stdlib lgamma keeps this independent of special_fn
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def beta_pdf(factor: BetaFactor, t, one_minus_t=None):
    """Beta(u, v-u) density; pass ``one_minus_t`` when it is known exactly."""
    t = np.asarray(t, dtype=float)
    omt = 1.0 - t if one_minus_t is None else np.asarray(one_minus_t, dtype=float)
    a, b = factor.u, factor.v - factor.u
    return np.exp((a - 1.0) * np.log(t) + (b - 1.0) * np.log(omt) - _log_beta_fn(a, b))


def _product_density(factors, t, omt, n):
    """Density of the product of ``factors`` at t (with 1 - t given as omt)."""
    if len(factors) == 1:
        return beta_pdf(factors[0], t, omt)
    *prev, last = factors
    delta_prev = sum(f.v - f.u for f in prev)
    beta_last = last.v - last.u
    s, w = _quadrature._nodes(n)
    s = 0.5 * (s + 1.0)
    w = 0.5 * w
    pa = _quadrature.power_for(beta_last - 1.0)
    pb = _quadrature.power_for(delta_prev - 1.0)
    half = 0.5 * omt[:, None]
    # left half: tau = t + d, the (1 - t/tau)^(beta-1) end
    d = half * s ** pa
    tau_a = t[:, None] + d
    omt_a = omt[:, None] - d
    jac_a = half * pa * s ** (pa - 1)
    # right half: tau = 1 - e, the (1 - tau)^(delta-1) end
    e = half * s ** pb
    tau_b = 1.0 - e
    omt_b = e
    jac_b = half * pb * s ** (pb - 1)
    out = np.zeros_like(t)
    for tau, om, d_from_t, jac in ((tau_a, omt_a, d, jac_a),
                                   (tau_b, omt_b, tau_b - t[:, None], jac_b)):
        inner = _product_density(prev, tau.ravel(), om.ravel(), n).reshape(tau.shape)
        ratio = t[:, None] / tau
        h = beta_pdf(last, ratio, d_from_t / tau)
        out += (inner * h / tau * jac) @ w
    return out


def conv_quadrature(spec: ProductSpec, x: float, target: float | None = None,
                    n_start: int = 16, n_max: int = 512) -> float:
    """Density at x by iterated multiplicative convolution of the factors,

        (f * g)(x) = int_x^1 f(t) g(x/t) dt / t,

    each level by Gauss-Legendre with power-law maps at both ends.  Node
    counts double until successive values differ by less than target / 4.
    """
    if not 0.0 < x < 1.0:
        raise DomainError(f"conv_quadrature needs 0 < x < 1, got {x}")
    factors = spec.factors
    if target is None:
        target = 1e-8 if len(factors) <= 3 else 1e-5
    t = np.array([float(x)])
    omt = np.array([1.0 - float(x)])
    if len(factors) == 1:
        return float(beta_pdf(factors[0], t, omt)[0])
    n = n_start
    prev = float(_product_density(factors, t, omt, n)[0])
    while n < n_max:
        n *= 2
        cur = float(_product_density(factors, t, omt, n)[0])
        if abs(cur - prev) < target / 4:
            return cur
        prev = cur
    raise ConvergenceError(
        f"convolution at x={x} missed target {target:g} (last change {abs(cur - prev):.3g})",
        cur)


def moment_quadrature(pdf, n: int, u_min: float, delta: float, tol: float = 1e-9,
                      split: float = 0.5, pdf_of_gap=None) -> float:
    """int_0^1 x^n pdf(x) dx for a density behaving like x^(u_min-1) at 0 and
    (1-x)^(delta-1) at 1.  ``pdf`` must accept numpy arrays.

    With ``pdf_of_gap`` (the density as a function of 1 - x) the piece above
    ``split`` is integrated in the gap variable, which keeps nodes that sit
    closer to 1 than machine epsilon; this matters when delta < 1.
    """
    if pdf_of_gap is None:
        value, _ = _quadrature.integrate(
            lambda x: x ** n * pdf(x), 0.0, 1.0, u_min - 1.0, delta - 1.0, tol=tol)
        return value
    low, _ = _quadrature.integrate(
        lambda x: x ** n * pdf(x), 0.0, split, u_min - 1.0, 0.0, tol=tol / 2)
    high, _ = _quadrature.integrate(
        lambda t: (1.0 - t) ** n * pdf_of_gap(t), 0.0, 1.0 - split, delta - 1.0, 0.0,
        tol=tol / 2)
    return low + high


def ks_statistic(batch: SampleBatch, cdf) -> float:
    """sup |F_N - F| over the sorted sample; ``cdf`` is applied to the array."""
    x = batch.values
    n = len(x)
    f = np.broadcast_to(np.asarray(cdf(x), dtype=float), x.shape)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))


def beta_integral_2f1_check(alpha: float, beta: float, gamma_: float, x: float,
                       tol: float = 1e-12):
    """Both sides of

        int_x^1 t^(a-1) (1-t)^(b-1) (1 - x/t)^(g-1) dt
            = B(b, g) (1-x)^(b+g-1) 2F1(g - a, b; b + g; 1 - x).

    The left side is integrated after t = 1 - s + s x; returns (lhs, rhs).
    """
    if min(alpha, beta, gamma_) <= 0:
        raise DomainError("alpha, beta, gamma must be positive")
    if not 0.0 < x <= 1.0:
        raise DomainError(f"x must lie in (0, 1], got {x}")
    if x == 1.0:
        return 0.0, 0.0
    w = 1.0 - x

    def integrand(s, r):
        # s and r = 1 - s passed separately so neither end loses precision;
        # t = 1 - s w, 1 - t = s w, 1 - x/t = w r / t
        t = 1.0 - s * w
        return (w * t ** (alpha - 1.0) * (s * w) ** (beta - 1.0)
                * (w * r / t) ** (gamma_ - 1.0))

    scale = math.exp(_log_beta_fn(beta, gamma_)) * w ** (beta + gamma_ - 1.0)
    qtol = tol * max(scale, 1e-300) / 2
    left, _ = _quadrature.integrate(lambda s: integrand(s, 1.0 - s), 0.0, 0.5,
                                    beta - 1.0, 0.0, tol=qtol, n_max=4096)
    right, _ = _quadrature.integrate(lambda r: integrand(1.0 - r, r), 0.0, 0.5,
                                     gamma_ - 1.0, 0.0, tol=qtol, n_max=4096)
    lhs = left + right
    log_b = log_gamma(beta) + log_gamma(gamma_) - log_gamma(beta + gamma_)
    rhs = (math.exp(log_b + (beta + gamma_ - 1.0) * math.log(w))
           * gauss_2f1(gamma_ - alpha, beta, beta + gamma_, w))
    return lhs, rhs
