"""Densities of the state-determinant family.

At alpha = 1/2, 1, 2 the u-differences are integers, so there is no branch
sum at the origin.  The evaluator then runs the (1 - x) series all the way
down, and a fourth-order combination of generic neighbours in alpha gives an
independent value.  The interpolation sums origin series, so it loses
accuracy where those series cancel: large x and steep densities.
"""

from betaprod import build_model, pdf, pdf_interpolated_alpha, state_determinant_spec
from betaprod.oracles import conv_quadrature

for alpha in (0.5, 1.0, 2.0):
    spec = state_determinant_spec(alpha)
    model = build_model(spec)
    print(f"alpha = {alpha}: factors {[(round(f.u, 4), round(f.v, 4)) for f in spec.factors]}")
    for x in (0.1, 0.5, 0.8):
        direct = pdf(model, x)
        interp = pdf_interpolated_alpha(state_determinant_spec, alpha, x=x)
        conv = conv_quadrature(spec, x)
        print(f"  x = {x}: unit series {direct:.10g}  interpolated {interp:.10g}  convolution {conv:.10g}")

target = pdf(build_model(state_determinant_spec(1.0)), 0.8)
print("\nerror of the interpolation at alpha = 1, x = 0.8:")
for h in (1 / 8, 1 / 16, 1 / 32):
    err = pdf_interpolated_alpha(state_determinant_spec, 1.0, h=h, x=0.8) - target
    print(f"  h = 1/{round(1 / h)}: {err:+.3e}")
