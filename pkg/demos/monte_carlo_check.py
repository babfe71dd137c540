"""Seeded sampling against the series cdf.

Draws products of Beta variates through Gamma ratios, then compares the
empirical distribution with the evaluated cdf and the sample moments with
the exact Pochhammer ratios.
"""

import math

import numpy as np

from betaprod import build_model, cdf, mms_spec, moment, quantile
from betaprod.oracles import ks_statistic, sample_product

spec = mms_spec()
model = build_model(spec)
batch = sample_product(spec, 10 ** 6, seed=7)

print(f"{batch.count} samples, seed {batch.seed}")
print(f"KS distance to the series cdf: {ks_statistic(batch, lambda x: cdf(model, x)):.2e}"
      f" (2/sqrt(N) = {2 / math.sqrt(batch.count):.2e})")
for n in (1, 2, 3):
    exact = moment(spec, n)
    se = math.sqrt((moment(spec, 2 * n) - exact ** 2) / batch.count)
    print(f"  E[X^{n}]: sample {np.mean(batch.values ** n):.6f}  exact {exact:.6f}"
          f"  ({(np.mean(batch.values ** n) - exact) / se:+.2f} SE)")
print("quartiles, series vs sample:")
for p in (0.25, 0.5, 0.75):
    print(f"  {p}: {quantile(model, p):.6f}  {np.quantile(batch.values, p):.6f}")
