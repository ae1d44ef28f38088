"""Poisson and Herglotz integrals of step profiles, and outer functions.

For an arc ``I = [a, b)`` (turns) and ``|z| < 1`` the Herglotz integral has
the closed form

    H_I(z) = |I| + (1/(pi i)) [Log(1 - z conj(xi_b)) - Log(1 - z conj(xi_a))],

with ``xi = exp(2 pi i t)``.  Since ``Re(1 - z conj(xi)) > 0`` the principal
logarithm is continuous along the arc and no branch bookkeeping is needed.
A step profile telescopes into one logarithm per breakpoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import mpmath
import numpy as np

from .errors import BranchError, DomainError, NotLogIntegrable
from .sets import FULL_CIRCLE, Arc, arcs_disjoint, as_fraction, circular_distance
from .weights import BoundaryWeight, CantorIndicator, Const, Zero, _frac_mp

__all__ = [
    "Polar",
    "AnalyticPiece",
    "StepProfile",
    "HerglotzValue",
    "OuterValue",
    "herglotz_arc",
    "poisson_integral",
    "herglotz_profile",
    "variation_sum_check",
    "VariationResult",
    "outer_eval",
    "log_modulus_profile",
    "poisson_kernel",
    "profile_fourier",
    "poisson_fft",
]

# log of the largest finite double, with some headroom
EXP_BUDGET = 700.0


@dataclass(frozen=True)
class Polar:
    """Point ``(1 - s) exp(2 pi i t)`` given by its angle and gap ``s = 1 - |z|``.

    Keeping ``s`` separate avoids cancellation in ``1 - z conj(xi)`` for
    points very close to the circle.
    """

    t: float
    s: float

    @classmethod
    def from_complex(cls, z) -> "Polar":
        z = complex(z)
        return cls(math.atan2(z.imag, z.real) / (2 * math.pi) % 1.0, 1.0 - abs(z))

    @property
    def z(self) -> complex:
        return (1 - self.s) * complex(math.cos(2 * math.pi * self.t), math.sin(2 * math.pi * self.t))


def _as_polar(z) -> Polar:
    p = z if isinstance(z, Polar) else Polar.from_complex(z)
    if not p.s > 0:
        raise DomainError("evaluation point must lie in the open unit disk")
    return p


def _check_branch(p: Polar, precision: int):
    if p.s < 2.0 ** (-precision / 4):
        raise BranchError(f"|z| within 2^-{precision / 4:g} of the unit circle")


def _log_one_minus(s, t, tk):
    """``Log(1 - r exp(2 pi i (t - tk)))`` with ``r = 1 - s``; shape (len(t), len(tk))."""
    s = np.asarray(s, dtype=float)[:, None]
    theta = 2 * np.pi * np.subtract.outer(np.asarray(t, dtype=float), tk)
    r = 1.0 - s
    sh = np.sin(0.5 * theta)
    re = s + 2 * r * sh * sh
    im = -r * np.sin(theta)
    return 0.5 * np.log(re * re + im * im) + 1j * np.arctan2(im, re)


def herglotz_arc(I: Arc, z, precision: int = 128) -> complex:
    """``int_I (xi + z)/(xi - z) dm(xi)`` in closed form (mpmath).

    The ratio of the two endpoint factors is written as ``1 + delta`` and
    its logarithm taken with ``log1p`` so short arcs keep full relative
    accuracy.
    """
    p = _as_polar(z)
    _check_branch(p, precision)
    with mpmath.workprec(precision):
        length = _frac_mp(I.length)
        if I.is_full():
            return complex(1)
        if p.s == 1:
            return complex(length)
        r = 1 - mpmath.mpf(p.s)
        zz = r * mpmath.expjpi(2 * mpmath.mpf(p.t))
        a = _frac_mp(I.start)
        xa = mpmath.expjpi(-2 * a)
        # conj(xi_a) - conj(xi_b) = conj(xi_a) (1 - exp(-2 pi i |I|))
        diff = -xa * mpmath.expm1(-2j * mpmath.pi * length)
        delta = zz * diff / (1 - zz * xa)
        val = length + mpmath.log1p(delta) / (1j * mpmath.pi)
        return complex(val)


def poisson_kernel(r, t):
    """``P_r(2 pi t) = (1 - r^2) / (1 - 2 r cos(2 pi t) + r^2)``."""
    r = np.asarray(r, dtype=float)
    # denominator as (1 - r)^2 + 4 r sin^2(pi t) avoids cancellation near t = 0
    s = np.sin(np.pi * np.asarray(t))
    return (1 - r) * (1 + r) / ((1 - r) ** 2 + 4 * r * s * s)


# --------------------------------------------------------------------------
# profiles


@dataclass(frozen=True)
class AnalyticPiece:
    """A non-constant piece ``f`` on an arc, given by callables.

    ``func_mp`` evaluates in mpmath, ``func_np`` is its vectorised float
    twin; ``integral`` and ``l1`` are the exact (or quadrature) integrals
    of ``f`` and ``|f|`` over the arc.
    """

    arc: Arc
    func_mp: Callable
    func_np: Callable
    integral: float
    l1: float
    label: str = "analytic"
    kinks: tuple = ()


class StepProfile:
    """Piecewise profile on the circle: constants on arcs plus analytic pieces.

    Values on constant pieces may be Fractions, in which case the mean is
    exact.  Off all pieces the profile is zero.
    """

    def __init__(self, pieces: Sequence = (), analytic: Sequence[AnalyticPiece] = ()):
        cleaned = []
        for arc, v in pieces:
            arc = arc if isinstance(arc, Arc) else Arc(*arc)
            if isinstance(v, float) and not math.isfinite(v):
                raise DomainError("profile values must be finite")
            cleaned.append((arc, v))
        self.pieces = tuple(cleaned)
        self.analytic = tuple(analytic)
        if not arcs_disjoint([a for a, _ in self.pieces] + [p.arc for p in self.analytic]):
            raise DomainError("profile pieces must be disjoint")
        self._bp = None
        self._table = None

    @classmethod
    def zero(cls) -> "StepProfile":
        return cls()

    @classmethod
    def constant(cls, v) -> "StepProfile":
        return cls([(FULL_CIRCLE, v)])

    def __len__(self):
        return len(self.pieces) + len(self.analytic)

    @property
    def mean(self):
        """``int f dm``: exact when all values are rational and no analytic piece."""
        if all(isinstance(v, (int, Fraction)) for _, v in self.pieces) and not self.analytic:
            return sum((Fraction(v) * a.length for a, v in self.pieces), Fraction(0))
        return math.fsum([float(v) * float(a.length) for a, v in self.pieces] + [float(p.integral) for p in self.analytic])

    @property
    def l1_norm(self) -> float:
        return math.fsum([abs(float(v)) * float(a.length) for a, v in self.pieces] + [float(p.l1) for p in self.analytic])

    def scaled(self, c) -> "StepProfile":
        """``c * f``; analytic pieces are scaled through their callables."""
        ca = []
        for p in self.analytic:
            fm, fn = p.func_mp, p.func_np
            ca.append(
                AnalyticPiece(
                    p.arc,
                    (lambda t, fm=fm: c * fm(t)),
                    (lambda t, fn=fn: float(c) * fn(t)),
                    c * p.integral,
                    abs(c) * p.l1,
                    p.label,
                    p.kinks,
                )
            )
        return StepProfile([(a, v * c) for a, v in self.pieces], ca)

    def __add__(self, other: "StepProfile") -> "StepProfile":
        return StepProfile(self.pieces + other.pieces, self.analytic + other.analytic)

    def breakpoints(self):
        """Telescoped breakpoint angles and weights for the constant pieces."""
        if self._bp is None:
            acc: dict = {}
            for arc, v in self.pieces:
                if arc.is_full():
                    continue
                a, b = arc.start % 1, arc.end % 1
                acc[a] = acc.get(a, 0) - v
                acc[b] = acc.get(b, 0) + v
            keys = sorted(k for k, w in acc.items() if w != 0)
            t = np.array([float(k) for k in keys])
            w = np.array([float(acc[k]) for k in keys])
            self._bp = (t, w)
        return self._bp

    def _lookup(self):
        if self._table is None:
            lo, hi, val = [], [], []
            for arc, v in self.pieces:
                for a, b in arc.pieces():
                    lo.append(float(a))
                    hi.append(float(b))
                    val.append(float(v))
            order = np.argsort(lo)
            self._table = (np.array(lo)[order], np.array(hi)[order], np.array(val)[order])
        return self._table

    def value(self, t) -> np.ndarray:
        t = np.mod(np.atleast_1d(np.asarray(t, dtype=float)), 1.0)
        lo, hi, val = self._lookup()
        out = np.zeros(t.shape)
        if len(lo):
            idx = np.searchsorted(lo, t, side="right") - 1
            ok = (idx >= 0) & (t < hi[np.clip(idx, 0, None)])
            out[ok] = val[idx[ok]]
        for p in self.analytic:
            sel = p.arc.contains(t)
            if np.any(sel):
                out[sel] = p.func_np(t[sel])
        return out

    def rows(self):
        """``(arc_start, arc_end, value)`` rows; analytic pieces report NaN."""
        out = [(float(a.start), float(a.end), float(v)) for a, v in self.pieces]
        out += [(float(p.arc.start), float(p.arc.end), math.nan) for p in self.analytic]
        return sorted(out)


@dataclass(frozen=True)
class HerglotzValue:
    z: complex
    value: complex


_GL16 = np.polynomial.legendre.leggauss(16)


def _graded_panels(lo, hi, c, width):
    """Panel edges on ``[lo, hi]`` refined geometrically towards ``c``."""
    c = min(max(c, lo), hi)
    edges = {lo, hi, c}
    h = width
    while h < hi - lo:
        for e in (c - h, c + h):
            if lo < e < hi:
                edges.add(e)
        h *= 2
    return np.array(sorted(edges))


def _analytic_herglotz(p: AnalyticPiece, pol: Polar) -> complex:
    """Herglotz integral of an analytic piece by graded Gauss-Legendre panels."""
    x, wq = _GL16
    total = 0j
    r = 1.0 - pol.s
    for lo, hi in p.arc.pieces():
        lo, hi = float(lo), float(hi)
        # representative of the point's angle nearest the interval
        c = pol.t + round(((lo + hi) / 2 - pol.t))
        edges = _graded_panels(lo, hi, c, max(pol.s, 1e-15) / (2 * np.pi))
        for k in p.kinks:
            for shift in (-1, 0, 1):
                if lo < k + shift < hi:
                    edges = np.union1d(edges, [k + shift])
        a, b = edges[:-1, None], edges[1:, None]
        t = (0.5 * (b - a) * x + 0.5 * (a + b)).ravel()
        wt = (0.5 * (b - a) * wq).ravel()
        theta = 2 * np.pi * (pol.t - t)
        sh = np.sin(0.5 * theta)
        den = (pol.s + 2 * r * sh * sh) + 1j * (-r * np.sin(theta))
        zx = r * np.exp(1j * theta)
        kernel = 1 + 2 * zx / den
        total += np.sum(wt * p.func_np(t) * kernel)
    return complex(total)


def profile_fourier(f: StepProfile, nmax: int) -> np.ndarray:
    """Coefficients ``f^(n)`` for ``0 <= n <= nmax`` of the constant pieces."""
    tk, wk = f.breakpoints()
    out = np.zeros(nmax + 1, dtype=complex)
    out[0] = float(f.mean) - math.fsum(float(p.integral) for p in f.analytic)
    n = np.arange(1, nmax + 1)
    for j in range(0, nmax, 2048):
        nb = n[j : j + 2048]
        for i in range(0, len(tk), 1024):
            ph = np.exp(-2j * np.pi * np.outer(nb, tk[i : i + 1024]))
            out[1 + j : 1 + j + len(nb)] += ph @ wk[i : i + 1024]
    out[1:] /= -2j * np.pi * n
    return out


def poisson_fft(f: StepProfile, radii, n_angles: int = 4096, tol: float = 1e-17):
    """``P_f(r e^{2 pi i t_j})`` on the uniform angles ``t_j = j / n_angles``.

    Only constant pieces are supported.  The series is truncated where
    ``r**n`` drops below ``tol``; frequencies beyond the grid are folded
    onto it, which is exact at the grid points.  Returns an array
    ``(len(radii), n_angles)``.
    """
    if f.analytic:
        raise DomainError("poisson_fft handles constant pieces only")
    radii = np.asarray(radii, dtype=float)
    rmax = float(radii.max())
    nmax = int(math.log(tol) / math.log(rmax)) + 1 if rmax > 0 else 1
    c = profile_fourier(f, nmax)
    n = np.arange(nmax + 1)
    out = np.empty((len(radii), n_angles))
    for i, r in enumerate(radii):
        terms = c * r**n
        # real profile: P = Re(c_0 + 2 sum_{n>0} c_n r^n e^{2 pi i n t})
        terms[1:] *= 2
        spec = np.zeros(n_angles, dtype=complex)
        np.add.at(spec, n % n_angles, terms)
        out[i] = np.fft.ifft(spec).real * n_angles
    return out


def herglotz_profile(f: StepProfile, z, precision: int = 128, chunk: int = 256) -> np.ndarray:
    """``int f (xi+z)/(xi-z) dm`` at one point or an array of points."""
    pts = [_as_polar(q) for q in np.atleast_1d(np.asarray(z, dtype=object))]
    for p in pts:
        _check_branch(p, precision)
    s = np.array([p.s for p in pts])
    t = np.array([p.t for p in pts])
    tk, wk = f.breakpoints()
    out = np.full(len(pts), float(f.mean) - math.fsum(float(p.integral) for p in f.analytic), dtype=complex)
    if len(tk):
        for i in range(0, len(pts), chunk):
            L = _log_one_minus(s[i : i + chunk], t[i : i + chunk], tk)
            out[i : i + chunk] += (L @ wk) / (1j * np.pi)
    for p in f.analytic:
        for i, q in enumerate(pts):
            out[i] += _analytic_herglotz(p, q)
    return out


def poisson_integral(f: StepProfile, z, precision: int = 128):
    """``P_f(z)``, the real part of the Herglotz integral of ``f``."""
    scalar = np.ndim(z) == 0 and not isinstance(z, (list, tuple))
    val = herglotz_profile(f, z, precision).real
    return float(val[0]) if scalar else val


@dataclass(frozen=True)
class OuterValue:
    """``g(z) = exp(H(z))``; ``value`` is ``None`` when it would overflow."""

    z: complex
    log: complex
    value: complex | None

    @property
    def log_modulus(self) -> float:
        return self.log.real

    @property
    def modulus(self) -> float:
        return math.exp(self.log.real) if self.log.real < EXP_BUDGET else math.inf


def outer_eval(f: StepProfile, z, precision: int = 128):
    """Outer function with boundary log-modulus ``f`` at ``z`` (scalar or array)."""
    scalar = np.ndim(z) == 0 and not isinstance(z, (list, tuple))
    zs = list(np.atleast_1d(np.asarray(z, dtype=object)))
    H = herglotz_profile(f, zs, precision)
    out = []
    for q, h in zip(zs, H):
        zc = q.z if isinstance(q, Polar) else complex(q)
        val = complex(np.exp(h)) if abs(h.real) < EXP_BUDGET else None
        out.append(OuterValue(zc, complex(h), val))
    return out[0] if scalar else out


# --------------------------------------------------------------------------
# variation of the Poisson kernel over arcs


@dataclass(frozen=True)
class VariationResult:
    sum: float
    bound: float
    ok: bool
    sharp_bound: float


def _arc_extremes(arc: Arc, r: float):
    a, b = float(arc.start), float(arc.end)
    da, db = circular_distance(a, 0.0), circular_distance(b, 0.0)
    near = 0.0 if arc.contains_exact(Fraction(0)) or arc.is_full() else min(da, db)
    half = Fraction(1, 2)
    far = 0.5 if arc.contains_exact(half) or arc.is_full() else max(da, db)
    return float(poisson_kernel(r, near)), float(poisson_kernel(r, far))


def variation_sum_check(intervals: Sequence[Arc], r: float) -> VariationResult:
    """Sum of ``sup - inf`` of ``P_r`` over disjoint arcs versus ``4/(1-r)``.

    ``P_r`` decreases in the circular distance from angle 0, so on each arc
    the supremum sits at the point nearest 0 and the infimum at the point
    nearest 1/2; closures are used since only sup and inf matter.
    """
    r = float(r)
    if not 0 <= r < 1:
        raise DomainError("r must lie in [0, 1)")
    arcs = [a if isinstance(a, Arc) else Arc(*a) for a in intervals]
    if not arcs_disjoint(arcs):
        raise DomainError("arcs must be disjoint")
    total = math.fsum(hi - lo for hi, lo in (_arc_extremes(a, r) for a in arcs))
    bound = 4.0 / (1.0 - r)
    return VariationResult(total, bound, total <= bound, 2 * (1 + r) / (1 - r))


# --------------------------------------------------------------------------
# log-modulus profiles for outer functions


def log_modulus_profile(w: BoundaryWeight, I: Arc, resolution: int = 64):
    """Step profile of ``log min(w, 1)`` on ``I`` (zero off ``I``).

    Constant pieces are exact.  Cusp pieces are replaced by their cell
    averages over ``resolution`` equal cells per monotone stretch; the
    returned ``l1_error`` bounds the L1 distance to the true profile using
    ``int |g - avg| <= 2 |int g - g(e) h|`` with ``e`` an extreme endpoint.
    Returns ``(profile, l1_error)``.
    """
    if w.log_divergent(I):
        raise NotLogIntegrable("log w is not integrable over the arc")
    pieces = []
    err = 0.0
    with mpmath.workprec(64):
        for parc, p in w.pieces:
            for sub in parc.intersect(I):
                if isinstance(p, Const):
                    v = math.log(min(float(p.v), 1.0))
                    if v != 0:
                        pieces.append((sub, v))
                    continue
                g = lambda t, p=p: min(mpmath.log(p.value_mp(t)), mpmath.mpf(0)) if p.value_mp(t) > 0 else -mpmath.inf
                for lo, hi in sub.pieces():
                    brk = _monotone_breaks(p, float(lo), float(hi))
                    for u0, u1 in zip(brk, brk[1:]):
                        for j in range(resolution):
                            c0 = u0 + (u1 - u0) * j / resolution
                            c1 = u0 + (u1 - u0) * (j + 1) / resolution
                            h = c1 - c0
                            integ = mpmath.quad(g, [c0, c1])
                            avg = float(integ) / h
                            e0, e1 = g(c0), g(c1)
                            ext = e0 if abs(e0) < abs(e1) else e1
                            err += 2 * abs(float(integ) - float(ext) * h)
                            if avg != 0:
                                pieces.append((Arc(c0, c1), avg))
    return StepProfile(pieces), err


def _monotone_breaks(p, lo, hi):
    pts = {lo, hi}
    for base in (p.t0, p.t0 + 0.5, p.t0 - 0.5, p.t0 + 1, p.t0 - 1):
        if lo < base < hi:
            pts.add(base)
    return sorted(pts)
