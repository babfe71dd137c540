"""Two-factor products: closed form, branch sum and convolution side by side.

When u2 - u1 is an integer the branch sum does not exist and the density
picks up logarithms; the log formula covers that case.
"""

import numpy as np

from betaprod import make_spec
from betaprod.oracles import conv_quadrature
from betaprod.series_origin import build_origin, eval_origin_pdf, m2_closed_pdf, m2_log_pdf, m2_log_params

generic = make_spec([(0.4, 1.3), (1.15, 2.0)])
print("generic pair", [(f.u, f.v) for f in generic.factors])
print("     x     closed form       branch sum        convolution")
origin = build_origin(generic)
for x in (0.05, 0.3, 0.6, 0.9):
    print(f"  {x:.2f}  {m2_closed_pdf(generic, x):.13f}  {float(eval_origin_pdf(origin, x)):.13f}"
          f"  {conv_quadrature(generic, x):.13f}")

log_case = make_spec([(0.5, 1.2), (2.5, 3.4)])
params = m2_log_params(log_case)
print("\ninteger gap pair", [(f.u, f.v) for f in log_case.factors], "-> (u1, n, v1, v2) =", params)
print("     x     log formula      closed form      convolution")
for x in (0.001, 0.05, 0.4, 0.8):
    print(f"  {x:<5}  {m2_log_pdf(*params, x):.13f}  {m2_closed_pdf(log_case, x):.13f}"
          f"  {conv_quadrature(log_case, x):.13f}")

print("\nfor u = (1, 2), v = (2, 3) every path gives 2(1 - x):",
      np.allclose([m2_log_pdf(1, 1, 2, 3, x) for x in (0.2, 0.7)], [1.6, 0.6]))
