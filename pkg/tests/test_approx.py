import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diskapprox.approx import (MeasureSpec, TargetSpec, annihilator, bm_majorant, certificate, gram,
                               predict_structure, splitting_profile)
from diskapprox.errors import DomainError
from diskapprox.sets import FULL_CIRCLE, Arc, CircleSet, FatCantorSpec
from diskapprox.weights import BoundaryWeight, RadialWeight

G1 = RadialWeight.expdec(1)
ONE = BoundaryWeight.constant(1)
J = Arc(Fraction(9, 20), Fraction(11, 20))


def _alpha_oracle(c, n):
    # 2 int_0^1 r^(2n+1) exp(-c/(1-r)) dr, split at the peak of the integrand
    f = lambda r: r ** (2 * n + 1) * mpmath.exp(-c / (1 - r)) if r < 1 else mpmath.mpf(0)
    peak = 1 - (-c + mpmath.sqrt(c * c + 4 * c * (2 * n + 1))) / (2 * (2 * n + 1))
    return 2 * mpmath.quad(f, [0, peak, 1])


def test_gram_limits():
    gs = gram(MeasureSpec(None, ONE), 6)
    assert np.allclose(gs.as_complex(), np.eye(7), atol=1e-30)
    gs = gram(MeasureSpec(G1, None), 6)
    A = gs.as_complex()
    assert np.count_nonzero(A - np.diag(np.diag(A))) == 0
    with mpmath.workdps(30):
        for n in (0, 3, 6):
            assert A[n, n].real == pytest.approx(float(_alpha_oracle(1, n)), rel=1e-13)
    with pytest.raises(DomainError):
        MeasureSpec(None, None)


def test_gram_is_hermitian_toeplitz_plus_diagonal():
    mu = MeasureSpec(G1, BoundaryWeight.cantor(FatCantorSpec(), 1.0, 8))
    A = gram(mu, 8).as_complex()
    assert np.allclose(A, A.conj().T, atol=1e-15)
    off = A - np.diag(np.diag(A))
    for k in range(1, 9):
        d = np.diagonal(off, -k)
        assert np.allclose(d, d[0], atol=1e-15)
    assert np.all(np.linalg.eigvalsh(A) > 0)


def test_distance_matches_diagonal_oracle():
    N_list = [0, 1, 5, 20]
    prof = splitting_profile(MeasureSpec(G1, ONE), TargetSpec.indicator(CircleSet(arcs=(J,))), N_list)
    with mpmath.workdps(40):
        a, b = mpmath.mpf(9) / 20, mpmath.mpf(11) / 20
        norm2 = b - a
        for r in prof.rows:
            s = norm2
            for n in range(r["N"] + 1):
                bn = norm2 if n == 0 else (mpmath.expjpi(-2 * n * b) - mpmath.expjpi(-2 * n * a)) / (-2j * mpmath.pi * n)
                s -= abs(bn) ** 2 / (_alpha_oracle(1, n) + 1)
            assert r["d_N"] == pytest.approx(float(mpmath.sqrt(s)), rel=1e-12)
    assert prof.strictly_decreasing


def test_trivial_targets():
    z = TargetSpec.from_coefficients({1: 1.0})
    prof = splitting_profile(MeasureSpec(None, ONE), z, [0, 1, 2])
    assert prof.values()[0] == pytest.approx(1.0) and prof.values()[1:] == [0.0, 0.0]
    assert splitting_profile(MeasureSpec(G1, ONE), TargetSpec.zero(), [3]).values() == [0.0]
    # conj(xi) is orthogonal to every polynomial when w is constant
    zc = TargetSpec.from_coefficients({-1: 1.0})
    d = splitting_profile(MeasureSpec(G1, BoundaryWeight.constant(3)), zc, [0, 10, 50]).values()
    assert d == pytest.approx([math.sqrt(3)] * 3, rel=1e-13)


@settings(max_examples=10)
@given(st.sampled_from(["expdec", "power"]), st.floats(0.3, 3), st.integers(1, 30))
def test_profiles_are_monotone(family, c, N):
    G = RadialWeight.expdec(c) if family == "expdec" else RadialWeight.power(c)
    t = TargetSpec.indicator(CircleSet(arcs=(Arc(Fraction(1, 10), Fraction(2, 5)),)))
    prof = splitting_profile(MeasureSpec(G, ONE), t, range(N + 1))
    assert prof.monotone
    assert all(0 <= v <= math.sqrt(0.3) + 1e-12 for v in prof.values())


def test_majorant_bounds_and_samples():
    maj = bm_majorant(G1, Arc(Fraction(7, 15), Fraction(8, 15)), N_max=200)
    for n in range(-200, 201):
        assert abs(maj.h(n)) <= maj.bounds[abs(n)]
    t, hv = maj.samples(1 << 14)
    fft = np.fft.fft(hv) / len(hv)
    for n in (0, 1, 7, 50):
        assert fft[n] == pytest.approx(complex(maj.h(n)), abs=1e-12)
    # h is a nonnegative bump supported inside J
    outside = (t < 7 / 15 - 1e-3) | (t > 8 / 15 + 1e-3)
    assert np.max(np.abs(hv[outside])) < 1e-10 and hv.min() > -1e-10
    assert maj.l2_norm2() == pytest.approx(np.mean(hv**2), rel=1e-8)


def test_certificate_on_irreducible_indicator():
    mu = MeasureSpec(G1, ONE)
    tup = annihilator(mu, FULL_CIRCLE, N_max=60)
    assert tup.exact and tup.residual_ok and tup.F_bound_ok
    t = TargetSpec.indicator(CircleSet(arcs=(J,)))
    cert = certificate(tup, t, 60, ONE)
    d = splitting_profile(mu, t, [60]).values()[0]
    assert 0 < cert.value <= d + 1e-8
    off = TargetSpec.indicator(CircleSet(arcs=(Arc(Fraction(0), Fraction(1, 20)),)))
    assert certificate(tup, off, 60, ONE).vacuous


def test_predictions():
    cantor = BoundaryWeight.cantor(FatCantorSpec(), 1.0, 20)
    assert predict_structure(MeasureSpec(G1, cantor)).verdict == "full splitting"
    assert predict_structure(MeasureSpec(G1, ONE)).verdict == "irreducible"
    p = predict_structure(MeasureSpec(RadialWeight.stretched(1, 0.5), ONE))
    assert p.verdict == "out of scope" and p.flags["khrushchev_regime"]
