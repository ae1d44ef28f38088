"""Radial moments, the envelope k, Fourier coefficients of w and log integrals.

All radial moments are computed from the single integral

    I(x) = int_0^1 r**x G(1 - r) dr = int_0^1 (1 - u)**x G(u) du,

so that ``alpha_n = 2 I(2n + 1)`` and ``P(x) = I(|x|)``.  The integrand is
log-concave in ``u``; its peak is located first and the integration range is
cut where the integrand drops below ``2**-precision`` times the peak.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import gmpy2
import mpmath
import numpy as np
from gmpy2 import mpfr

from .errors import DomainError, UnsupportedProfile
from .quadrature import adaptive_gl, bisect_float, safe_exp, to_mpf
from .sets import FULL_CIRCLE, Arc, CircleSet
from .weights import (
    BoundaryWeight,
    CantorIndicator,
    Const,
    RadialWeight,
    Zero,
    _frac_mp,
)

__all__ = [
    "MomentValue",
    "MomentTable",
    "alpha_moment",
    "alpha_table",
    "moment_P",
    "EnvelopeValue",
    "envelope_k",
    "k_quotient_integral",
    "PBoundReport",
    "verify_P_lower_bound",
    "FourierCoefficient",
    "fourier_w",
    "SzegoResult",
    "szego_mean",
]


@dataclass(frozen=True)
class MomentValue:
    """A moment with an absolute error bound (mpmath numbers)."""

    value: mpmath.mpf
    error: mpmath.mpf

    def __float__(self):
        return float(self.value)

    @property
    def rel_error(self) -> float:
        return float(self.error / abs(self.value)) if self.value else math.inf


# --------------------------------------------------------------------------
# the radial integral I(x)


def _m_raw_float(G: RadialWeight, u: float) -> float:
    if u <= 0:
        return 0.0 if G.family == "power" and G.beta == 0 else math.inf
    f = G.family
    if f == "power":
        return -G.beta * math.log(u)
    if f == "expdec":
        return G.c / u
    if f == "stretched":
        return G.c * u ** (-G.alpha)
    if f == "double-exp":
        return safe_exp(G.c / u) if G.c / u < 700 else math.inf
    return G._table_m(u)


def _dm_raw_float(G: RadialWeight, u: float) -> float:
    f = G.family
    if f == "power":
        return -G.beta / u
    if f == "expdec":
        return -G.c / u**2
    if f == "stretched":
        return -G.c * G.alpha * u ** (-G.alpha - 1)
    if f == "double-exp":
        return -G.c / u**2 * safe_exp(G.c / u) if G.c / u < 700 else -math.inf
    return G._table_dm(u)


def _m_raw_gmp(G: RadialWeight, u):
    f = G.family
    if f == "power":
        return -G.beta * gmpy2.log(u)
    if f == "expdec":
        return G.c / u
    if f == "stretched":
        return G.c * u ** (-G.alpha)
    if f == "double-exp":
        return gmpy2.exp(G.c / u)
    return mpfr(G._table_m(float(u)))


def _phi(G, x, u):
    """Log of the integrand (float), -inf outside the support."""
    if u <= 0 or u >= 1:
        if u <= 0 and G.family == "power" and G.beta == 0:
            return 0.0
        if u >= 1 and x == 0:
            return -_m_raw_float(G, 1.0)
        return -math.inf
    return x * math.log1p(-u) - _m_raw_float(G, u)


def _window(G: RadialWeight, x: float, prec: int):
    """Integration window ``[u_lo, u_hi]`` and tail bound relative to the peak."""
    dphi = lambda u: -x / (1 - u) - _dm_raw_float(G, u)
    lo, hi = 1e-100, 1 - 1e-16
    if dphi(lo) <= 0:
        peak = 0.0
    elif dphi(hi) >= 0:
        peak = 1.0
    else:
        peak = bisect_float(dphi, lo, hi)
    phi_peak = max(_phi(G, x, peak), _phi(G, x, min(max(peak, lo), hi)))
    drop = (prec + 24) * math.log(2)
    thresh = phi_peak - drop
    g = lambda u: _phi(G, x, u) - thresh
    u_lo = 0.0
    if peak > 0 and g(0.0) < 0:
        u_lo = bisect_float(g, 0.0, peak)
    u_hi = 1.0
    if peak < 1 and g(1.0) < 0:
        u_hi = bisect_float(g, peak, 1.0)
    tail = 0.0
    if u_lo > 0:
        tail += safe_exp(_phi(G, x, u_lo)) * u_lo
    if u_hi < 1:
        tail += safe_exp(_phi(G, x, u_hi)) * (1 - u_hi)
    return u_lo, u_hi, tail


def _radial_integral(G: RadialWeight, x: float, prec: int) -> MomentValue:
    x = abs(float(x))
    u_lo, u_hi, tail = _window(G, x, prec)
    rel_tol = mpfr(2) ** (-(prec // 2) - 8)
    with gmpy2.context(gmpy2.get_context(), precision=prec + 16):
        xm = mpfr(x)

        def f(u):
            if u <= 0 or u >= 1:
                return mpfr(1) if (u <= 0 and G.family == "power" and G.beta == 0) else mpfr(0)
            return gmpy2.exp(xm * gmpy2.log1p(-u) - _m_raw_gmp(G, u))

        res = adaptive_gl(f, u_lo, u_hi, prec, rel_tol)
        with mpmath.workprec(prec + 16):
            val = to_mpf(res.value)
            err = to_mpf(res.error) + mpmath.mpf(tail)
    return MomentValue(val, err)


@lru_cache(maxsize=8192)
def _cached_integral(G: RadialWeight, x: float, prec: int) -> MomentValue:
    return _radial_integral(G, x, prec)


def alpha_moment(G: RadialWeight, n: int, precision: int = 128) -> MomentValue:
    """``alpha_n = 2 int_0^1 r**(2n+1) G(1-r) dr`` with an error bound."""
    if n < 0 or int(n) != n:
        raise DomainError("moment index must be a nonnegative integer")
    I = _cached_integral(G, float(2 * n + 1), int(precision))
    with mpmath.workprec(precision + 16):
        return MomentValue(2 * I.value, 2 * I.error)


def moment_P(G: RadialWeight, x, precision: int = 128) -> MomentValue:
    """``P(x) = int_0^1 r**|x| G(1-r) dr`` (even in ``x``)."""
    return _cached_integral(G, abs(float(x)), int(precision))


@dataclass(frozen=True)
class MomentTable:
    alpha: tuple
    precision: int
    G_key: str

    @property
    def N(self) -> int:
        return len(self.alpha) - 1

    def values(self):
        return [a.value for a in self.alpha]

    def errors(self):
        return [a.error for a in self.alpha]

    def is_decreasing(self) -> bool:
        """Strict decrease checked with interval semantics."""
        return all(
            b.value + b.error < a.value - a.error for a, b in zip(self.alpha, self.alpha[1:])
        )

    def rows(self):
        return [(n, a.value, a.error) for n, a in enumerate(self.alpha)]


def alpha_table(G: RadialWeight, N: int, precision: int = 128) -> MomentTable:
    return MomentTable(tuple(alpha_moment(G, n, precision) for n in range(N + 1)), precision, G.key())


# --------------------------------------------------------------------------
# envelope


@dataclass(frozen=True)
class EnvelopeValue:
    x: float
    k: float
    argmin_y: float
    attained: bool = True
    method: str = "stationarity"


def envelope_k(G: RadialWeight, x, precision: int = 128) -> EnvelopeValue:
    """``k(x) = inf_{0<y<=1} m(y) + y x`` and its minimiser.

    For families with a closed-form derivative the stationarity equation
    ``m'(y) = -x`` is solved by bisection on the increasing function
    ``m'``; when ``m'(1) < -x`` the minimum sits at ``y = 1``.  Tables use
    an exact scan of their nodes, since ``m`` is piecewise linear there.
    """
    x = float(x)
    if not x > 0:
        raise DomainError("envelope argument must be positive")
    with mpmath.workprec(precision):
        if G.family == "table":
            cands = [(float(G.m_mp(y) + y * x), y) for y in (*G.table_x, 1.0)]
            k, y = min(cands)
            m0 = float(G.m_mp(G.table_x[0]))
            if m0 < k:
                return EnvelopeValue(x, m0, 0.0, False, "node scan")
            return EnvelopeValue(x, k, y, True, "node scan")
        X = mpmath.mpf(x)
        if G.dm_mp(1) <= -X:
            return EnvelopeValue(x, float(G.m_mp(1) + X), 1.0, True, "boundary")
        hi = mpmath.mpf(1)
        lo = mpmath.mpf(1) / 2
        while G.dm_mp(lo) > -X:
            hi = lo
            lo /= 2
        tol = mpmath.mpf(2) ** (-(precision // 2))
        while hi - lo > tol * hi:
            mid = (lo + hi) / 2
            if G.dm_mp(mid) > -X:
                hi = mid
            else:
                lo = mid
        y = (lo + hi) / 2
        return EnvelopeValue(x, float(G.m_mp(y) + y * X), float(y))


def _k_mp(G: RadialWeight, x):
    """Envelope as an mpmath number (for quadrature)."""
    if x <= 0:
        return G.m_mp(1) if G.family != "table" else min(G.m_mp(1), G.m_mp(G.table_x[0]))
    return mpmath.mpf(envelope_k(G, float(x), precision=64).k)


def k_quotient_integral(G: RadialWeight):
    """``int_0^oo k(x)/(1+x**2) dx`` (``+inf`` when divergent).

    The substitution ``x = tan(theta)`` maps the half-line to
    ``[0, pi/2]``; the kink of ``k`` at ``x = -m'(1)`` is a breakpoint.
    Returns ``(value, error)``.
    """
    if G.family == "double-exp":
        # y_x ~ c / log x gives k(x) >= c x / (2 log x) for large x
        return math.inf, 0.0
    with mpmath.workprec(64):
        if G.family == "table":
            if all(m == 0 for m in G.table_m) and G.shift_mp() == 0:
                return 0.0, 0.0
            pts = [0, *(mpmath.atan(1 / y) for y in reversed(G.table_x) if y < 1), mpmath.pi / 2]
            pts = sorted(set(pts))
        else:
            xb = -G.dm_mp(1)
            pts = [0, mpmath.atan(xb), mpmath.pi / 2] if xb > 0 else [0, mpmath.pi / 2]
        val, err = mpmath.quad(lambda th: _k_mp(G, mpmath.tan(th)), pts, error=True)
    return float(val), float(err)


@dataclass(frozen=True)
class PBoundReport:
    rows: list
    violations: int
    threshold: float | None

    @property
    def ok(self) -> bool:
        return self.violations == 0


def verify_P_lower_bound(G: RadialWeight, x_grid, precision: int = 128) -> PBoundReport:
    """Check ``P(x) >= exp(-k(2x)) / (4x)`` for the normalised weight.

    Points whose envelope minimiser ``y(2x)`` is not below 1/2 are marked
    ``precondition unmet`` rather than counted.  ``threshold`` is the
    smallest grid point from which all later points pass.
    """
    rows = []
    with mpmath.workprec(precision):
        scale = mpmath.exp(-G.shift_mp())
        for x in x_grid:
            x = float(x)
            env = envelope_k(G, 2 * x, precision)
            if not env.argmin_y < 0.5:
                rows.append({"x": x, "status": "precondition unmet", "margin": None})
                continue
            P = moment_P(G, x, precision)
            lhs = scale * (P.value - P.error)
            rhs = mpmath.exp(-mpmath.mpf(env.k)) / (4 * x)
            margin = mpmath.log(lhs) - mpmath.log(rhs)
            status = "holds" if margin > 0 else "violated"
            rows.append({"x": x, "status": status, "margin": float(margin), "P": float(P.value),
                         "bound": float(rhs), "k2x": env.k, "argmin_y": env.argmin_y})
    violations = sum(r["status"] == "violated" for r in rows)
    threshold = None
    for r in reversed(rows):
        if r["status"] != "holds":
            break
        threshold = r["x"]
    return PBoundReport(rows, violations, threshold)


# --------------------------------------------------------------------------
# Fourier coefficients of w


@dataclass(frozen=True)
class FourierCoefficient:
    index: int
    value: mpmath.mpc
    error_bound: float

    def __complex__(self):
        return complex(self.value)


def fourier_w(w: BoundaryWeight, k: int, precision: int = 128) -> FourierCoefficient:
    """``w^(k) = int w(t) exp(-2 pi i k t) dt``.

    Constant pieces are exact, cusp pieces use oscillatory quadrature and
    Cantor indicators use the closed form of their stage set, whose
    distance from the limit set is bounded by ``v |E - E_stage|``.
    """
    k = int(k)
    with mpmath.workprec(precision + 16):
        total = mpmath.mpc(0)
        err = mpmath.mpf(0)
        for arc, p in w.pieces:
            if isinstance(p, Zero):
                continue
            if isinstance(p, CantorIndicator):
                total += p.fourier(k)
                err += p.v * _frac_mp(p.part.sym_diff_bound)
                continue
            for lo, hi in arc.pieces():
                if isinstance(p, Const):
                    total += p.fourier(k, lo, hi)
                    err += p.v * _frac_mp(hi - lo) * mpmath.mpf(2) ** (-precision)
                else:
                    val, e = p.fourier(k, float(lo), float(hi))
                    total += val
                    err += e
        err += abs(total) * mpmath.mpf(2) ** (-precision)
    return FourierCoefficient(k, total, float(err))


# --------------------------------------------------------------------------
# log integrals


@dataclass(frozen=True)
class SzegoResult:
    log_integral: float
    geometric_mean: float


def szego_mean(w: BoundaryWeight, S: CircleSet | None = None) -> SzegoResult:
    """``int_S log w dm`` (``-inf`` detected from the profile rules).

    Cantor limit sets inside ``S`` are handled when ``w`` is constant there
    or is the indicator of the same set.
    """
    S = CircleSet.full() if S is None else S
    with mpmath.workprec(80):
        parts = [w.log_integral(a) for a in S.arcs]
        for c in S.cantor_parts:
            hit = None
            for arc, p in w.pieces:
                if arc.contains_arc(c.spec.base):
                    hit = p
            if isinstance(hit, Zero):
                parts.append(-mpmath.inf)
            elif isinstance(hit, Const) or (isinstance(hit, CantorIndicator) and hit.spec == c.spec):
                parts.append(mpmath.log(hit.v) * _frac_mp(c.measure))
            else:
                raise UnsupportedProfile("log integral over a Cantor set needs a constant or matching profile")
        if any(x == -mpmath.inf for x in parts):
            return SzegoResult(-math.inf, 0.0)
        total = mpmath.fsum(parts)
        return SzegoResult(float(total), float(mpmath.exp(total)))
