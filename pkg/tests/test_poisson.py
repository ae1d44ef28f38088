import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from diskapprox.errors import BranchError, DomainError, NotLogIntegrable
from diskapprox.poisson import (Polar, StepProfile, herglotz_arc, herglotz_profile, log_modulus_profile,
                                outer_eval, poisson_fft, poisson_integral, poisson_kernel,
                                variation_sum_check)
from diskapprox.sets import FULL_CIRCLE, Arc
from diskapprox.weights import BoundaryWeight, Const, PowerCusp, Zero

HALVES = StepProfile([(Arc(0, Fraction(1, 2)), 1), (Arc(Fraction(1, 2), 1), -1)])


def test_herglotz_arc_examples():
    assert herglotz_arc(FULL_CIRCLE, 0.3 + 0.4j) == 1
    assert abs(herglotz_arc(Arc(0.2, 0.5), 0) - 0.3) < 1e-15


@given(st.floats(0, 1, exclude_max=True), st.floats(0.01, 0.9), st.floats(0, 1, exclude_max=True),
       st.floats(0.05, 0.95))
def test_herglotz_arc_against_quadrature(a, length, t, r):
    I = Arc(a, a + length)
    z = r * complex(math.cos(2 * math.pi * t), math.sin(2 * math.pi * t))
    zm = mpmath.mpc(z)
    # breakpoints around the peak of the kernel at angle t
    lo, hi = float(I.start), float(I.end)
    pts = sorted({lo, hi, *(p for k in (-1, 0, 1) for p in (t + k - 0.05, t + k, t + k + 0.05) if lo < p < hi)})
    ref = mpmath.quad(lambda s: (mpmath.expjpi(2 * s) + zm) / (mpmath.expjpi(2 * s) - zm), pts)
    assert abs(herglotz_arc(I, z) - complex(ref)) < 1e-11


def test_branch_guard_near_circle():
    with pytest.raises(BranchError):
        herglotz_arc(Arc(0, 0.5), Polar(0.1, 1e-20), precision=128)
    with pytest.raises(DomainError):
        herglotz_arc(Arc(0, 0.5), 1.0)


def test_poisson_integral_examples():
    assert poisson_integral(StepProfile.constant(1), 0.5 + 0.2j) == pytest.approx(1.0, abs=1e-14)
    assert abs(poisson_integral(HALVES, 0.0)) < 1e-15


def test_halves_against_gauss_legendre_oracle():
    z = 0.9
    x, w = np.polynomial.legendre.leggauss(2048)
    total = 0.0
    for lo, hi, v in ((0.0, 0.5, 1.0), (0.5, 1.0, -1.0)):
        t = lo + (hi - lo) * (x + 1) / 2
        total += v * (hi - lo) / 2 * np.sum(w * poisson_kernel(z, t))
    assert poisson_integral(HALVES, z) == pytest.approx(total, abs=1e-10)


@given(st.lists(st.tuples(st.integers(0, 63), st.integers(-5, 5)), min_size=1, max_size=12, unique_by=lambda p: p[0]),
       st.sampled_from([0.3, 0.8, 0.95]))
def test_fft_route_matches_closed_form_route(cells, r):
    prof = StepProfile([(Arc(Fraction(c, 64), Fraction(c + 1, 64)), v) for c, v in cells])
    fft = poisson_fft(prof, [r], n_angles=256)[0]
    t = np.arange(256) / 256
    direct = herglotz_profile(prof, [Polar(tt, 1 - r) for tt in t]).real
    assert np.max(np.abs(fft - direct)) < 1e-11


def test_variation_examples():
    full = variation_sum_check([FULL_CIRCLE], 0.5)
    assert full.sum == pytest.approx(8 / 3, rel=1e-14) and full.bound == 8 and full.ok
    assert variation_sum_check([Arc(0.1, 0.3), Arc(0.5, 0.7)], 0.0).sum == 0.0
    with pytest.raises(DomainError):
        variation_sum_check([Arc(0, 0.5), Arc(0.4, 0.6)], 0.5)


@given(st.lists(st.integers(0, 199), min_size=2, max_size=40, unique=True).map(sorted),
       st.sampled_from([0.0, 0.5, 0.9, 0.99]))
def test_variation_against_dense_sampling(cuts, r):
    arcs = [Arc(Fraction(a, 200), Fraction(b, 200)) for a, b in zip(cuts[0::2], cuts[1::2])]
    res = variation_sum_check(arcs, r)
    sampled = 0.0
    for a in arcs:
        t = np.linspace(float(a.start), float(a.end), 4001)
        p = poisson_kernel(r, t)
        sampled += p.max() - p.min()
    assert res.sum >= sampled - 1e-9
    assert res.sum <= sampled * (1 + 1e-3) + 1e-6
    assert res.ok


def test_outer_examples():
    assert outer_eval(StepProfile.zero(), 0.3 - 0.2j).value == 1
    g0 = outer_eval(HALVES.scaled(3), 0.0)
    assert abs(g0.modulus - 1) < 1e-14


def test_radial_boundary_fidelity():
    f = StepProfile([(Arc(0.1, 0.4), 2), (Arc(0.6, 0.65), -3)])
    ts = np.array([0.25, 0.625, 0.85])
    vals = outer_eval(f, [Polar(t, 1e-8) for t in ts], precision=256)
    errs = [abs(v.log_modulus - fv) for v, fv in zip(vals, f.value(ts))]
    assert max(errs) <= 1e-6


def test_log_modulus_profile_examples():
    prof, err = log_modulus_profile(BoundaryWeight.constant(1), Arc(0, 0.5))
    assert len(prof) == 0 and err == 0
    c = 0.3
    I = Arc(0.2, 0.45)
    prof, _ = log_modulus_profile(BoundaryWeight.constant(c), I)
    u0 = outer_eval(prof, 0.0)
    assert u0.modulus == pytest.approx(c**0.25, rel=1e-14)
    with pytest.raises(NotLogIntegrable):
        log_modulus_profile(BoundaryWeight(((Arc(0, 0.5), Zero()), (Arc(0.5, 1), Const(1.0)))), Arc(0.4, 0.6))


def test_log_modulus_refinement_halves_error():
    w = BoundaryWeight.single(PowerCusp(0.5, 2.0, 1.0))
    I = Arc(0.4, 0.6)
    errs = [log_modulus_profile(w, I, res)[1] for res in (16, 32, 64)]
    for a, b in zip(errs, errs[1:]):
        assert b <= 0.6 * a
