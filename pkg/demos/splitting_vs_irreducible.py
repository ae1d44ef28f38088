"""
Splitting versus irreducibility
===============================

Two measures with the same disk weight.  On the fat Cantor carrier the
distance from the indicator of the carrier to polynomials keeps falling;
with a constant boundary weight the indicator of a short arc stays at a
positive distance, and an annihilating tuple certifies a lower bound.
"""

from fractions import Fraction

from diskapprox import (FULL_CIRCLE, Arc, BoundaryWeight, CircleSet, FatCantorSpec, MeasureSpec,
                        RadialWeight, TargetSpec, annihilator, certificates, predict_structure,
                        splitting_profile)

G = RadialWeight.expdec(1)
Ns = [0, 10, 50, 100, 200, 400]

# fat Cantor indicator: every arc meets the zero set, so log w is never integrable
w_cantor = BoundaryWeight.cantor(FatCantorSpec(), 1.0, 20)
mu = MeasureSpec(G, w_cantor)
E = TargetSpec.indicator(CircleSet(cantor_parts=(w_cantor.cantor_pieces()[0].part,)), "1_E")
print(predict_structure(mu).verdict)
for r in splitting_profile(mu, E, Ns).rows:
    print(f"  N={r['N']:4d}  d_N={r['d_N']:.10f}")

# constant weight: the indicator of J stays away from the polynomials
mu = MeasureSpec(G, BoundaryWeight.constant(1))
t = TargetSpec.indicator(CircleSet(arcs=(Arc(Fraction(9, 20), Fraction(11, 20)),)), "1_J")
print(predict_structure(mu).verdict)
tup = annihilator(mu, FULL_CIRCLE, N_max=200)
certs = certificates(tup, t, Ns, mu.w)
for r in splitting_profile(mu, t, Ns).rows:
    print(f"  N={r['N']:4d}  d_N={r['d_N']:.10f}  lower bound={certs[r['N']].value:.6f}")
print("max residual / norm:", tup.max_residual / tup.norm)
