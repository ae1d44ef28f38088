import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diskapprox.errors import StructuralError
from diskapprox.moments import alpha_moment
from diskapprox.sets import FULL_CIRCLE, Arc, CircleSet, FatCantorSpec, arcs_disjoint
from diskapprox.weights import (BoundaryWeight, CantorIndicator, ExpCusp, RadialWeight,
                                carrier_and_residual)
from diskapprox.witness import (WitnessFamily, build_fN, cantor_arcs_in, default_level, verify_conditions,
                                vitali_select)

W = BoundaryWeight.cantor(FatCantorSpec(), 1.0, 20)
F = carrier_and_residual(W).F
G = RadialWeight.expdec(1)


@pytest.mark.parametrize("N", [10, 1000])
def test_selection_covers_F_with_short_divergent_arcs(N):
    arcs = vitali_select(W, F, N)
    assert arcs_disjoint(arcs)
    assert all(N * a.length <= 1 for a in arcs)
    assert all(W.log_divergent(a) for a in arcs)
    ind = CantorIndicator(FatCantorSpec(), 1.0, 20)
    covered = sum((ind.measure_in(*a.pieces()[0], limit=True) for a in arcs), Fraction(0))
    assert F.measure - covered < Fraction(1, N)
    if N == 1000:
        assert max(a.length for a in arcs) <= Fraction(1, 1000)


def test_selection_edge_cases():
    assert vitali_select(BoundaryWeight.constant(1), CircleSet(), 10) == []
    with pytest.raises(StructuralError):
        vitali_select(W, CircleSet(arcs=(Arc(0, 0.1),)), 10)


def test_cantor_arcs_in_matches_flat_filter():
    sp = FatCantorSpec()
    I = Arc(Fraction(1, 7), Fraction(3, 5))
    tree = cantor_arcs_in(sp, 9, I)
    flat = [b for a in sp.stage_arcs(9) for b in a.intersect(I)]
    assert sum((a.length for a in tree), Fraction(0)) == sum((a.length for a in flat), Fraction(0))
    assert default_level(sp, 10) == min(k for k in range(30) if 10 * sp.arc_length(k) <= 1)


@settings(max_examples=15)
@given(st.integers(2, 400))
def test_c1_family_invariants(N):
    fam = build_fN(W, vitali_select(W, F, N), N, F=F)
    assert set(fam.cases) == {"C1"}
    assert fam.f_N.mean == 0 and isinstance(fam.f_N.mean, Fraction)
    for d, I in zip(fam.arc_data, fam.intervals):
        assert d["l1"] == pytest.approx(2 * N * d["F_measure_stage"])
        assert d["l1"] <= 2 + 1e-12
    # depth -N on every selected Cantor arc
    pts = np.array([float(a.midpoint) for a in cantor_arcs_in(FatCantorSpec(), fam.stage, FULL_CIRCLE)])
    assert np.all(fam.f_N.value(pts) <= -N)


def _exp_integral_oracle(fam):
    # w is the stage-20 indicator; integrate exp(f) piecewise over its measure
    ind = CantorIndicator(FatCantorSpec(), 1.0, 20)
    total, seen = 0.0, Fraction(0)
    for a, v in fam.f_N.pieces:
        for lo, hi in a.pieces():
            m = ind.measure_in(lo, hi, limit=False)
            if m == 0:
                continue
            total += math.exp(float(v)) * float(m)
            seen += m
    return total + float(FatCantorSpec().stage_measure(20) - seen)


def test_cantor_scenario_N100_all_pass():
    fam = build_fN(W, vitali_select(W, F, 100), 100, F=F)
    rep = verify_conditions(fam, W, G, F=F)
    assert rep.five_pass, rep.failures
    assert rep.C <= 4
    v = rep.verdict("v_")
    assert v.bound == pytest.approx(1.5, rel=1e-6)
    assert v.value == pytest.approx(_exp_integral_oracle(fam), rel=1e-9)
    assert rep.fidelity_error <= 1e-6 and rep.growth_ok


def test_degenerate_family_fails_only_depth():
    arcs = vitali_select(W, F, 10)
    rep = verify_conditions(WitnessFamily.degenerate(arcs, 10), W, G, F=F)
    status = {v.name: v.passed for v in rep.verdicts}
    assert not status["ii_depth"]
    assert status["i_mean_zero"] and status["iv_poisson"] and status["v_exp_integral"]


def test_c2_case_on_exp_cusp():
    w = BoundaryWeight.single(ExpCusp(0.0, 1.0, 1.0))
    I = Arc(Fraction(-1, 200), Fraction(1, 200))
    fam = build_fN(w, [I], 100, F=CircleSet())
    d = fam.arc_data[0]
    assert fam.cases == ["C2"]
    assert 100 * float(I.length) <= d["alpha"] <= 2 * 100 * float(I.length)
    assert abs(float(fam.f_N.mean)) <= 1e-10
    rep = verify_conditions(fam, w, G, F=CircleSet())
    assert rep.verdict("i_").passed and rep.verdict("iv_").passed and rep.verdict("v_").passed
