"""
Witness functions on the fat Cantor carrier
===========================================

For each N a step function f_N is built on short arcs covering the
residual set: mean zero, very negative on the set, with controlled
Poisson extension and exponential integral.  The five conditions are
checked numerically together with the outer function's boundary fidelity.
"""

from diskapprox import (BoundaryWeight, FatCantorSpec, RadialWeight, build_fN, carrier_and_residual,
                        verify_conditions, vitali_select)

G = RadialWeight.expdec(1)
w = BoundaryWeight.cantor(FatCantorSpec(), 1.0, 20)
F = carrier_and_residual(w).F
print("residual set measure:", float(F.measure))

for N in (10, 100):
    arcs = vitali_select(w, F, N)
    fam = build_fN(w, arcs, N, F=F)
    rep = verify_conditions(fam, w, G, F=F)
    print(f"N = {N}: {len(arcs)} arcs, cases {sorted(set(fam.cases))}")
    for v in rep.verdicts:
        print(f"  {v.name:16s} {'pass' if v.passed else 'FAIL'}  value {v.value:.4g}  bound {v.bound:.4g}")
    print(f"  fidelity error {rep.fidelity_error:.2e}, growth ok {rep.growth_ok}")
