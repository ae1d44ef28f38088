import math

import gmpy2
import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from diskapprox.errors import DomainError
from diskapprox.moments import (alpha_moment, alpha_table, envelope_k, k_quotient_integral, moment_P,
                                szego_mean, verify_P_lower_bound)
from diskapprox.quadrature import adaptive_gl, from_mpf, gl_rule, to_mpf
from diskapprox.sets import Arc, CircleSet
from diskapprox.weights import BoundaryWeight, ChordPower, RadialWeight


@given(st.integers(1, 30), st.integers(0, 59))
def test_gl_rule_exact_on_monomials(degree, p):
    if p > 2 * degree - 1:
        return
    xs, ws = gl_rule(degree, 128)
    with gmpy2.context(gmpy2.get_context(), precision=140):
        val = gmpy2.fsum([w * x**p for x, w in zip(xs, ws)])
    assert abs(float(val) - 1 / (p + 1)) < 1e-30 + 1e-30 * (p + 1)
    assert abs(to_mpf(val) - mpmath.mpf(1) / (p + 1)) < mpmath.mpf(2) ** -110


def test_from_mpf_keeps_full_precision():
    with mpmath.workprec(200):
        x = mpmath.mpf(1) / 3
        back = to_mpf(from_mpf(x, 200))
        assert back == x


def test_adaptive_gl_boundary_layer():
    # exp(-1/(1-r)) type layer near r = 1
    f = lambda r: gmpy2.exp(-1 / (1 - r)) if r < 1 else gmpy2.mpfr(0)
    res = adaptive_gl(f, 0, 1, 128, gmpy2.mpfr(2) ** -120)
    with mpmath.workprec(140):
        ref = mpmath.quad(lambda r: mpmath.exp(-1 / (1 - r)), [0, 0.5, 0.9, 1])
        assert abs(to_mpf(res.value) - ref) <= to_mpf(res.error) + mpmath.mpf(2) ** -100


def test_alpha_examples():
    assert float(alpha_moment(RadialWeight.power(1), 0).value) == pytest.approx(1 / 3, rel=1e-15)
    for n in (0, 1, 7, 50):
        assert float(alpha_moment(RadialWeight.power(0), n).value) == pytest.approx(1 / (n + 1), rel=1e-15)
    assert float(moment_P(RadialWeight.power(1), 1).value) == pytest.approx(1 / 6, rel=1e-15)
    G = RadialWeight.expdec(1)
    ref = mpmath.quad(lambda r: mpmath.exp(-1 / (1 - r)), [0, 1])
    assert float(moment_P(G, 0).value) == pytest.approx(float(ref), rel=1e-14)
    with pytest.raises(DomainError):
        alpha_moment(G, -1)


@given(st.floats(0.2, 3), st.integers(0, 120))
def test_moment_error_bound_covers_reference(c, n):
    G = RadialWeight.expdec(c)
    m = alpha_moment(G, n, 128)
    with mpmath.workprec(160):
        peak = 1 - mpmath.sqrt(c / (2 * n + 2))
        ref = 2 * mpmath.quad(lambda r: r ** (2 * n + 1) * mpmath.exp(-c / (1 - r)), [0, peak, 1])
        assert abs(m.value - ref) <= m.error + ref * mpmath.mpf(2) ** -100
    assert m.rel_error < 1e-20


@given(st.sampled_from([RadialWeight.expdec(1), RadialWeight.stretched(1, 0.5), RadialWeight.power(2)]))
def test_alpha_table_strictly_decreasing(G):
    assert alpha_table(G, 40).is_decreasing()


@pytest.mark.parametrize("x, k, y", [(4, 4.0, 0.5), (100, 20.0, 0.1), (0.5, 1.5, 1.0)])
def test_envelope_examples(x, k, y):
    e = envelope_k(RadialWeight.expdec(1), x)
    assert e.k == pytest.approx(k, rel=1e-12) and e.argmin_y == pytest.approx(y, rel=1e-12)


@given(st.floats(0.01, 1e5), st.floats(0.3, 3))
def test_envelope_is_lower_envelope(x, c):
    G = RadialWeight.expdec(c, normalize=False)
    e = envelope_k(G, x)
    ys = np.logspace(-6, 0, 4001)
    brute = np.min(c / ys + ys * x)
    assert e.k <= brute * (1 + 1e-12)
    assert brute - e.k <= 1e-3 * brute


def test_envelope_table_node_scan():
    G = RadialWeight.table([0.25, 0.5, 1.0], [6.0, 3.0, 1.0], normalize=False)
    # candidates at the nodes: 7.25, 5.5, 6 and the limit 6 as y -> 0
    e = envelope_k(G, 5.0)
    assert (e.k, e.argmin_y) == (5.5, 0.5)
    flat = envelope_k(G, 8.0)
    assert flat.k == 6.0 and not flat.attained


def test_k_quotient_integral_expdec():
    val, err = k_quotient_integral(RadialWeight.expdec(1))
    # k(x) = 1 + x below 1 and 2 sqrt(x) above
    head = mpmath.pi / 4 + mpmath.log(2) / 2
    tail = mpmath.pi * mpmath.sqrt(2) - mpmath.quad(lambda x: 2 * mpmath.sqrt(x) / (1 + x**2), [0, 1])
    assert val == pytest.approx(float(head + tail), rel=1e-10)
    assert float(mpmath.pi * mpmath.sqrt(2)) == pytest.approx(4.44288, abs=1e-5)


def test_k_quotient_integral_degenerate_and_divergent():
    assert k_quotient_integral(RadialWeight.double_exp(1))[0] == math.inf
    zero = RadialWeight.table([0.5, 1.0], [0.0, 0.0], normalize=False)
    assert k_quotient_integral(zero)[0] == 0.0


def test_P_lower_bound_guard_and_margin():
    rep = verify_P_lower_bound(RadialWeight.expdec(1), [0.5, 100.0])
    assert rep.rows[0]["status"] == "precondition unmet"
    assert rep.rows[1]["status"] == "holds" and rep.rows[1]["margin"] > 0
    assert rep.ok and rep.threshold == 100.0


def test_szego_examples():
    for c in (0.25, 3.0):
        r = szego_mean(BoundaryWeight.constant(c))
        assert r.log_integral == pytest.approx(math.log(c)) and r.geometric_mean == pytest.approx(c)
    assert szego_mean(BoundaryWeight.cantor()).log_integral == -math.inf
    chord = szego_mean(BoundaryWeight.single(ChordPower(0.0, 2.0, 1.0)))
    assert abs(chord.log_integral) < 1e-12
    # numeric cross-check by quadrature of log|1 - e^{2 pi i t}|^2 over an arc
    arc = Arc(0.1, 0.35)
    part = szego_mean(BoundaryWeight.single(ChordPower(0.0, 2.0, 1.0)), CircleSet(arcs=(arc,)))
    ref = mpmath.quad(lambda t: 2 * mpmath.log(abs(2 * mpmath.sinpi(t))), [0.1, 0.35])
    assert part.log_integral == pytest.approx(float(ref), rel=1e-12)
