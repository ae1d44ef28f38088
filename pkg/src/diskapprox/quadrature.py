"""Adaptive Gauss-Legendre quadrature in multiprecision.

Nodes come from mpmath and are cached per (degree, precision); the panel
arithmetic runs on gmpy2 ``mpfr`` values, which is several times faster
than mpmath for the tight loops used by the moment tables.
"""

from __future__ import annotations

import math
from functools import lru_cache

import gmpy2
import mpmath
from gmpy2 import mpfr

from .errors import PrecisionUnreachable

__all__ = ["gl_rule", "adaptive_gl", "QuadResult", "to_mpf", "from_mpf"]


@lru_cache(maxsize=32)
def gl_rule(degree: int, prec: int):
    """Gauss-Legendre nodes and weights on [0, 1] as gmpy2 values."""
    with mpmath.workprec(prec + 16):
        X, W = mpmath.mp.gauss_quadrature(degree, "legendre")
        xs = [(1 + X[i]) / 2 for i in range(degree)]
        ws = [W[i] / 2 for i in range(degree)]
        return tuple(from_mpf(x, prec + 16) for x in xs), tuple(from_mpf(w, prec + 16) for w in ws)


def to_mpf(x):
    """gmpy2 value to an mpmath number, exactly."""
    if not isinstance(x, type(mpfr(0))):
        x = mpfr(x)
    if not gmpy2.is_finite(x):
        return mpmath.mpf(float(x))
    if x == 0:
        return mpmath.mpf(0)
    man, exp = x.as_mantissa_exp()
    return mpmath.mpf((int(man), int(exp)))


def from_mpf(x, prec: int):
    """mpmath number to a gmpy2 value, exactly when ``prec`` allows."""
    if not isinstance(x, mpmath.mpf):
        with mpmath.workprec(max(prec, 53)):
            x = mpmath.mpf(x)
    if not mpmath.isfinite(x):
        return mpfr(float(x))
    sign, mant, e, bc = x._mpf_
    with gmpy2.context(gmpy2.get_context(), precision=max(prec, bc or 1)):
        return gmpy2.mul_2exp(mpfr(gmpy2.mpz(mant) * (-1 if sign else 1)), e)


class QuadResult:
    __slots__ = ("value", "error", "panels")

    def __init__(self, value, error, panels):
        self.value = value
        self.error = error
        self.panels = panels

    def __repr__(self):
        return f"QuadResult({float(self.value)!r}, err={float(self.error):.3g}, panels={self.panels})"


def adaptive_gl(f, a, b, prec: int, rel_tol, degree: int = 24, max_panels: int = 20000):
    """Integrate ``f`` over ``[a, b]`` by adaptive bisection of GL panels.

    ``f`` receives and returns gmpy2 values.  A panel is accepted when its
    rule value agrees with the sum over its two halves to within
    ``rel_tol`` times the running magnitude estimate; the error bound is
    the sum of those discrepancies plus a rounding allowance.
    """
    xs, ws = gl_rule(degree, prec)
    with gmpy2.context(gmpy2.get_context(), precision=prec + 16):
        a, b = mpfr(a), mpfr(b)

        def rule(lo, hi):
            h = hi - lo
            return h * gmpy2.fsum([w * f(lo + h * x) for x, w in zip(xs, ws)])

        whole = rule(a, b)
        scale = abs(whole)
        stack = [(a, b, whole, 0)]
        total = []
        err = []
        panels = 0
        while stack:
            lo, hi, q, depth = stack.pop()
            mid = (lo + hi) / 2
            ql, qr = rule(lo, mid), rule(mid, hi)
            panels += 2
            diff = abs(ql + qr - q)
            scale = max(scale, abs(ql + qr))
            if diff <= rel_tol * scale or (hi - lo) < 2 ** (-prec) * max(1, abs(lo)):
                total.append(ql + qr)
                err.append(diff)
                continue
            if panels > max_panels or depth > 4 * prec:
                raise PrecisionUnreachable(
                    f"adaptive quadrature stalled after {panels} panels on [{float(lo)}, {float(hi)}]"
                )
            stack.append((mid, hi, qr, depth + 1))
            stack.append((lo, mid, ql, depth + 1))
        value = gmpy2.fsum(total)
        rounding = abs(value) * panels * degree * mpfr(2) ** (-prec)
        return QuadResult(value, gmpy2.fsum(err) + rounding, panels)


def bisect_float(g, lo, hi, iters: int = 200):
    """Root of a monotone sign change of ``g`` on ``[lo, hi]`` in floats."""
    glo = g(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        gm = g(mid)
        if (gm > 0) == (glo > 0):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def safe_exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf
