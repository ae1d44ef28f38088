"""
Where the dichotomy applies
===========================

Sweep the stretched-exponential exponent and report the regime checks.
Below alpha = 1 the weight decays too slowly and the prediction is out of
scope; at alpha = 1 both decay conditions hold.
"""

from diskapprox import BoundaryWeight, MeasureSpec, RadialWeight, predict_structure

w = BoundaryWeight.constant(1)
print(f"{'alpha':>6} {'expdec d':>10} {'loglog':>8}  verdict")
for alpha in (0.25, 0.5, 0.75, 0.9, 1.0):
    p = predict_structure(MeasureSpec(RadialWeight.stretched(1, alpha), w))
    print(f"{alpha:>6} {p.flags['expdec_d']:>10.4g} {str(p.flags['loglog']):>8}  {p.verdict}")

# the double exponential weight decays too fast for the majorant
p = predict_structure(MeasureSpec(RadialWeight.double_exp(1), w))
print("double-exp:", p.verdict, "loglog integrable:", p.flags["loglog"])
