"""
Radial moments and the Legendre envelope
========================================

How fast the monomial norms decay for a few radial weights, and how the
envelope k(x) controls that decay.
"""

import math

from diskapprox import RadialWeight, alpha_moment, envelope_k, verify_P_lower_bound

# polynomial weights decay like a power of n, expdec like exp(-2 sqrt(2cn))
weights = {
    "power beta=2": RadialWeight.power(2),
    "expdec c=1": RadialWeight.expdec(1),
    "stretched c=1 a=1/2": RadialWeight.stretched(1, 0.5),
}
print(f"{'n':>5}" + "".join(f"{k:>24}" for k in weights))
for n in (0, 10, 50, 100, 200):
    row = [float(alpha_moment(G, n).value) for G in weights.values()]
    print(f"{n:>5}" + "".join(f"{v:>24.6e}" for v in row))

# for expdec c=1 the envelope has the closed form 2 sqrt(x)
G = weights["expdec c=1"]
for x in (1, 10, 100, 1e4):
    e = envelope_k(G, x)
    print(f"k({x:g}) = {e.k:.12f}   2 sqrt(x) = {2 * math.sqrt(x):.12f}   y* = {e.argmin_y:.3e}")

# the moment P(x) never drops below exp(-k(2x)) / (4x)
rep = verify_P_lower_bound(G, [10, 100, 1000, 10000])
for row in rep.rows:
    print(row)
print("violations:", rep.violations)
