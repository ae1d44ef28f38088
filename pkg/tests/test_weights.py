import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from diskapprox.errors import DomainError
from diskapprox.moments import fourier_w
from diskapprox.sets import FULL_CIRCLE, Arc, FatCantorSpec
from diskapprox.weights import (BoundaryWeight, CantorIndicator, Const, ExpCusp, PowerCusp, RadialWeight,
                                Zero, carrier_and_residual, check_exp_dec, check_loglog_int, eval_boundary,
                                eval_radial)

families = st.one_of(
    st.builds(RadialWeight.power, st.floats(0.1, 5)),
    st.builds(RadialWeight.expdec, st.floats(0.1, 4)),
    st.builds(RadialWeight.stretched, st.floats(0.1, 4), st.floats(0.1, 1)),
    st.builds(RadialWeight.double_exp, st.floats(0.2, 2)),
)


def test_radial_examples():
    assert RadialWeight.power(1, normalize=False).G_raw(0.5) == pytest.approx(0.5)
    assert eval_radial(RadialWeight.expdec(1), 0.5) == pytest.approx(math.exp(-2), rel=1e-14)
    xs = np.array([0.3, 0.1, 0.03, 0.01, 0.001])
    vals = [eval_radial(RadialWeight.expdec(1), x) for x in xs]
    assert all(b < a for a, b in zip(vals, vals[1:])) and vals[-1] < 1e-300
    with pytest.raises(DomainError):
        eval_radial(RadialWeight.expdec(1), 0.0)
    with pytest.raises(DomainError):
        RadialWeight("gaussian")


@given(families, st.floats(0.01, 0.99), st.floats(0.01, 0.99))
def test_normalised_weight_increasing_and_below_one(G, x, y):
    lo, hi = sorted((x, y))
    assert eval_radial(G, 1.0) < 1
    assert eval_radial(G, lo) <= eval_radial(G, hi)


def test_normalisation_halves_large_weights():
    G = RadialWeight.power(1)
    # power weights have G(1) = 1, so the cut rule scales by 1/2
    assert eval_radial(G, 1.0) == pytest.approx(0.5)
    assert eval_radial(RadialWeight.expdec(1), 1.0) == pytest.approx(math.exp(-1))


@pytest.mark.parametrize("G, holds, d", [
    (RadialWeight.expdec(1), True, 1.0),
    (RadialWeight.expdec(2.5), True, 2.5),
    (RadialWeight.stretched(1, 0.5), False, 0.0),
    (RadialWeight.power(2), False, 0.0),
])
def test_exp_dec_examples(G, holds, d):
    r = check_exp_dec(G)
    assert r.holds == holds and r.d == pytest.approx(d)


@given(st.floats(0.1, 4))
def test_exp_dec_matches_grid_infimum(c):
    G = RadialWeight.expdec(c)
    xs = np.logspace(-8, 0, 2001)
    grid_min = min(x * G.m(x) for x in xs)
    assert check_exp_dec(G).d <= grid_min + 1e-12
    assert grid_min - check_exp_dec(G).d < 1e-6


def test_table_exp_dec_estimate():
    G = RadialWeight.table([0.25, 0.5, 1.0], [8.0, 4.0, 2.0])
    r = check_exp_dec(G)
    assert r.method == "grid estimate"
    # m is constant 8 below 1/4, so x m(x) -> 0
    assert r.d < 1e-6


def test_loglog_examples():
    e = check_loglog_int(RadialWeight.expdec(1))
    assert e.holds and e.integral == pytest.approx(1.0)
    assert not check_loglog_int(RadialWeight.double_exp(1)).holds
    assert check_loglog_int(RadialWeight.power(1)).holds


@given(st.floats(0.5, 4))
def test_loglog_closed_form_against_quadrature(c):
    G = RadialWeight.expdec(c, normalize=False)
    ref = mpmath.quad(lambda x: mpmath.log(c / x), [0, 1])
    assert check_loglog_int(G).integral == pytest.approx(float(ref), rel=1e-12)


def test_boundary_profile_examples():
    assert eval_boundary(BoundaryWeight.constant(1), 0.37).value == 1.0
    cusp = BoundaryWeight.single(ExpCusp(0.0, 1.0, 1.0))
    t = 0.1
    assert eval_boundary(cusp, t).value == pytest.approx(math.exp(-1 / (2 * math.pi * t)), rel=1e-14)
    sp = FatCantorSpec()
    w = BoundaryWeight.cantor(sp, 1.0, 3)
    gap_mid = float(sp.arc_length(1) + (sp.arc_length(0) - 2 * sp.arc_length(1)) / 2)
    v = eval_boundary(w, gap_mid)
    assert v.value == 0.0 and v.resolved


def test_pieces_must_cover_circle():
    with pytest.raises(DomainError):
        BoundaryWeight(((Arc(0, 0.5), Const(1.0)),))
    with pytest.raises(DomainError):
        Const(-1.0)


def test_carrier_and_residual_examples():
    r1 = carrier_and_residual(BoundaryWeight.constant(1))
    assert r1.E.measure == 1 and r1.F.is_empty()
    rc = carrier_and_residual(BoundaryWeight.cantor())
    assert rc.F.measure == Fraction(1, 2) and rc.E.measure == Fraction(1, 2)
    rx = carrier_and_residual(BoundaryWeight.single(ExpCusp(0.0, 1.0, 1.0)))
    assert rx.E.measure == 1 and rx.F.is_empty()
    mixed = BoundaryWeight(((Arc(0, 0.5), Zero()), (Arc(0.5, 1), Const(2.0))))
    rm = carrier_and_residual(mixed)
    # F lies inside the carrier, so the zero arc belongs to neither set
    assert rm.E.measure == Fraction(1, 2) and rm.F.is_empty()


def test_log_divergence_rules():
    cusp = ExpCusp(0.0, 1.0, 1.0)
    assert cusp.log_divergent(-0.1, 0.1)
    assert not cusp.log_divergent(0.2, 0.4)
    assert not ExpCusp(0.0, 0.5, 1.0).log_divergent(-0.1, 0.1)
    assert not PowerCusp(0.0, 2.0, 1.0).log_divergent(-0.1, 0.1)


def test_fourier_closed_forms():
    w1 = BoundaryWeight.constant(1)
    assert complex(fourier_w(w1, 0)) == 1
    assert complex(fourier_w(w1, 3)) == 0
    quarter = BoundaryWeight(((Arc(0, 0.25), Const(1.0)), (Arc(0.25, 1), Zero())))
    ref = (np.exp(-2j * np.pi / 4) - 1) / (-2j * np.pi)
    assert abs(complex(fourier_w(quarter, 1)) - ref) < 1e-15


@given(st.integers(-40, 40), st.integers(0, 10))
def test_cantor_fourier_matches_flat_sum(n, k):
    sp = FatCantorSpec(Arc(Fraction(1, 10), Fraction(9, 10)), "telescoping", Fraction(3, 5))
    p = CantorIndicator(sp, 2.0, k)
    starts = np.array([float(s) for s in sp.stage_starts(k)])
    L = float(sp.arc_length(k))
    if n == 0:
        ref = 2.0 * L * len(starts)
    else:
        ref = 2.0 * np.sum((np.exp(-2j * np.pi * n * (starts + L)) - np.exp(-2j * np.pi * n * starts))
                           / (-2j * np.pi * n))
    assert abs(complex(p.fourier(n)) - ref) < 1e-12


def test_cusp_fourier_against_direct_quadrature():
    w = BoundaryWeight.single(PowerCusp(0.3, 0.5, 2.0))
    ref = mpmath.quad(lambda t: 2 * (2 * mpmath.pi * min((t - 0.3) % 1, 1 - (t - 0.3) % 1)) ** 0.5
                      * mpmath.expjpi(-2 * 2 * t), [0, 0.3, 0.8, 1])
    fc = fourier_w(w, 2, 64)
    assert abs(complex(fc) - complex(ref)) < 1e-12
