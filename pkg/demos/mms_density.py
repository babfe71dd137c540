"""Density of the three-factor MMS product, from both series.

Prints the endpoint constants, a pdf/cdf table that marks which series
produced each value, and how closely the two series agree where they overlap.
"""

import numpy as np

from betaprod import build_model, cdf, evaluate, mms_spec, moment
from betaprod.series_origin import origin_pdf_with_error
from betaprod.series_unit import unit_pdf_with_error

spec = mms_spec()
model = build_model(spec)

print("factors:", [(f.u, f.v) for f in spec.factors])
print(f"crossover at x = {model.crossover}")
for br in model.origin.branches:
    print(f"  origin branch x^{br.exponent:+.2f}: leading constant {float(br.leading):+.12f}")
print(f"  unit prefactor {float(model.unit.prefactor):.12f}, first coefficients",
      np.round(model.unit.coeffs[:4], 12))

x = np.linspace(0.05, 0.95, 10)
values, regions, err = evaluate(model, x)
print("\n     x        pdf             cdf        series  est.err")
for xi, v, c, r, e in zip(x, values, cdf(model, x), regions, err):
    print(f"  {xi:.2f}  {v:.12f}  {c:.12f}  {r:>6}  {e:.1e}")

overlap = np.linspace(0.35, 0.7, 8)
o, _ = origin_pdf_with_error(model.origin, overlap)
u, _ = unit_pdf_with_error(model.unit, overlap)
print(f"\nlargest relative gap between the series on [0.35, 0.7]: {np.max(np.abs(o - u) / u):.1e}")
print(f"mean = {moment(spec, 1):.15f} (27/280 = {27 / 280:.15f})")
