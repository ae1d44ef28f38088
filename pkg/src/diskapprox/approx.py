"""Distances to polynomial spans and annihilator lower bounds.

The measure is ``G(1 - |z|) dA + w dm`` with ``dA`` normalised area.  The
Gram matrix of the monomials ``1, z, ..., z^N`` is diagonal plus Toeplitz:
``<z^n, z^m> = delta_{mn} alpha_n + w^(m - n)``.  Distances come from one
preconditioned Cholesky factorisation, which also gives every smaller
degree.  Lower bounds come from tuples orthogonal to all polynomials of
the relevant degree, built from a smooth bump ``h`` whose coefficients sit
under ``alpha_n / (1 + n)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import gmpy2
import mpmath
import numpy as np

from .errors import DomainError, MajorizationFailure, NotLogIntegrable, UnsupportedProfile
from .linalg import Factorization, factor_with_escalation, to_mpc
from .moments import alpha_moment, fourier_w, szego_mean
from .poisson import log_modulus_profile, profile_fourier
from .quadrature import to_mpf
from .sets import FULL_CIRCLE, Arc, CircleSet, as_fraction
from .weights import (
    BoundaryWeight,
    CantorIndicator,
    Const,
    RadialWeight,
    Zero,
    _exp_integral,
    _frac_mp,
    carrier_and_residual,
    check_exp_dec,
    check_loglog_int,
)

__all__ = [
    "MeasureSpec",
    "TargetSpec",
    "GramSystem",
    "gram",
    "distance",
    "DistanceProfile",
    "splitting_profile",
    "Majorant",
    "bm_majorant",
    "AnnihilatorTuple",
    "annihilator",
    "Certificate",
    "certificates",
    "certificate",
    "Prediction",
    "predict_structure",
]


@dataclass(frozen=True)
class MeasureSpec:
    """Disk part ``G`` and boundary part ``w``; either may be ``None`` (disabled)."""

    G: RadialWeight | None = None
    w: BoundaryWeight | None = None

    def __post_init__(self):
        if self.G is None and (self.w is None or self.w.is_zero()):
            raise DomainError("measure has neither a disk nor a boundary part")


@lru_cache(maxsize=65536)
def _what(w: BoundaryWeight, k: int, prec: int):
    return fourier_w(w, k, prec).value


def _alphas(G: RadialWeight, N: int, prec: int) -> list:
    return [alpha_moment(G, n, prec).value for n in range(N + 1)]


# --------------------------------------------------------------------------
# targets


def _cantor_node_fourier(p: CantorIndicator, n: int, start, level: int):
    """Coefficient of the stage set of ``p`` inside one tree node."""
    sp, K = p.spec, p.stage
    if n == 0:
        return mpmath.mpc(_frac_mp(sp.arc_length(K)) * 2 ** (K - level))
    centre = _frac_mp(start) + _frac_mp(sp.arc_length(level)) / 2
    prod = mpmath.mpf(1)
    for j in range(level + 1, K + 1):
        prod *= mpmath.cospi(2 * n * _frac_mp(sp.child_offset(j)))
    L = _frac_mp(sp.arc_length(K))
    return mpmath.expjpi(-2 * n * centre) * 2 ** (K - level) * prod * mpmath.sinpi(n * L) / (mpmath.pi * n)


def _cantor_fourier_in(p: CantorIndicator, n: int, lo: Fraction, hi: Fraction):
    """``int_[lo,hi) 1_{E_stage} e^{-2 pi i n t} dt`` by descending the tree."""
    sp, K = p.spec, p.stage
    total = mpmath.mpc(0)
    for shift in (-1, 0, 1):
        stack = [(sp.base.start + shift, 0)]
        while stack:
            start, level = stack.pop()
            end = start + sp.arc_length(level)
            a, b = max(start, lo), min(end, hi)
            if b <= a:
                continue
            if a == start and b == end:
                total += _cantor_node_fourier(p, n, start, level)
            elif level == K:
                total += _exp_integral(n, a, b)
            else:
                off = sp.arc_length(level) - sp.arc_length(level + 1)
                stack += [(start, level + 1), (start + off, level + 1)]
    return total


def _weighted_fourier_on(w: BoundaryWeight, arc: Arc, n: int):
    """``int_arc w e^{-2 pi i n t} dt``."""
    total = mpmath.mpc(0)
    for parc, p in w.pieces:
        for sub in parc.intersect(arc):
            for lo, hi in sub.pieces():
                if isinstance(p, Zero):
                    continue
                if isinstance(p, Const):
                    total += p.fourier(n, lo, hi)
                elif isinstance(p, CantorIndicator):
                    total += p.v * _cantor_fourier_in(p, n, lo, hi)
                else:
                    total += p.fourier(n, float(lo), float(hi))[0]
    return total


def _cantor_target(w: BoundaryWeight, part):
    """The piece of ``w`` carrying a Cantor target, and how to integrate over it."""
    for parc, p in w.pieces:
        if parc.contains_arc(part.spec.base):
            if isinstance(p, Zero):
                return None
            if isinstance(p, CantorIndicator) and p.spec == part.spec:
                return p
            if isinstance(p, Const):
                return CantorIndicator(part.spec, p.v, part.stage)
    raise UnsupportedProfile("a Cantor target needs a constant or matching Cantor piece of w")


@dataclass(frozen=True)
class TargetSpec:
    """Boundary target ``f``: indicator of a set, or ``sum c_k xi^k``; zero on the disk."""

    kind: str = "zero"
    set: CircleSet | None = None
    coefficients: tuple = ()
    label: str = ""

    @classmethod
    def indicator(cls, S: CircleSet, label: str = "") -> "TargetSpec":
        return cls("indicator", S, (), label or "indicator")

    @classmethod
    def from_coefficients(cls, coeffs, label: str = "") -> "TargetSpec":
        items = tuple(sorted((int(k), complex(v)) for k, v in dict(coeffs).items()))
        return cls("coefficients", None, items, label or "coefficients")

    @classmethod
    def zero(cls) -> "TargetSpec":
        return cls("zero", None, (), "zero")

    def b_vector(self, w: BoundaryWeight | None, N: int, prec: int) -> list:
        """``b_n = int f conj(xi^n) w dm`` for ``0 <= n <= N``."""
        with mpmath.workprec(prec + 16):
            if self.kind == "zero" or w is None:
                return [mpmath.mpc(0)] * (N + 1)
            if self.kind == "coefficients":
                return [
                    mpmath.fsum(mpmath.mpc(c) * _what_any(w, n - k, prec) for k, c in self.coefficients)
                    for n in range(N + 1)
                ]
            out = []
            for n in range(N + 1):
                total = mpmath.mpc(0)
                for a in self.set.arcs:
                    total += _weighted_fourier_on(w, a, n)
                for part in self.set.cantor_parts:
                    p = _cantor_target(w, part)
                    if p is not None:
                        total += p.fourier(n)
                out.append(total)
            return out

    def norm2(self, w: BoundaryWeight | None, prec: int):
        """``int |f|^2 w dm`` (stage sets for Cantor parts, matching the Gram data)."""
        with mpmath.workprec(prec + 16):
            if self.kind == "zero" or w is None:
                return mpmath.mpf(0)
            if self.kind == "coefficients":
                total = mpmath.mpc(0)
                for k, ck in self.coefficients:
                    for l, cl in self.coefficients:
                        total += mpmath.mpc(ck) * mpmath.conj(mpmath.mpc(cl)) * _what_any(w, l - k, prec)
                return total.real
            total = mpmath.mpf(0)
            for a in self.set.arcs:
                total += _weighted_fourier_on(w, a, 0).real
            for part in self.set.cantor_parts:
                p = _cantor_target(w, part)
                if p is not None:
                    total += p.fourier(0).real
            return total

    def support_arcs(self) -> list[Arc] | None:
        """Arcs outside which ``f`` vanishes, or ``None`` if unknown."""
        if self.kind == "zero":
            return []
        if self.kind == "indicator":
            arcs = list(self.set.arcs)
            arcs += [c.spec.base for c in self.set.cantor_parts]
            return arcs
        return None

    def describe(self) -> dict:
        d = {"kind": self.kind, "label": self.label}
        if self.kind == "indicator":
            d["arcs"] = [[str(a.start), str(a.end)] for a in self.set.arcs]
            d["cantor_parts"] = len(self.set.cantor_parts)
        elif self.kind == "coefficients":
            d["coefficients"] = {str(k): [c.real, c.imag] for k, c in self.coefficients}
        return d


def _what_any(w: BoundaryWeight, k: int, prec: int):
    """``w^(k)`` for any integer ``k`` (``w`` real, so negative indices conjugate)."""
    if k >= 0:
        return _what(w, k, prec)
    return mpmath.conj(_what(w, -k, prec))


# --------------------------------------------------------------------------
# Gram systems and distances


@dataclass
class GramSystem:
    """Monomial Gram matrix up to degree ``N``; entry ``(m, n)`` is ``<z^n, z^m>``."""

    mu: MeasureSpec
    N: int
    alpha: list
    what: list
    precision: int
    matrix: np.ndarray
    preconditioner: list

    def entry(self, m: int, n: int) -> complex:
        return complex(to_mpf(self.matrix[m, n].real), to_mpf(self.matrix[m, n].imag))

    def as_complex(self) -> np.ndarray:
        """Float copy of the matrix (for inspection and oracle comparison)."""
        n = self.N + 1
        out = np.empty((n, n), dtype=complex)
        for i in range(n):
            for j in range(n):
                z = self.matrix[i, j]
                out[i, j] = complex(float(z.real), float(z.imag))
        return out


def gram(mu: MeasureSpec, N: int, precision: int = 128) -> GramSystem:
    """Assemble the Gram matrix of ``1, z, ..., z^N`` at ``precision`` bits."""
    if N < 0:
        raise DomainError("degree must be nonnegative")
    prec = int(precision)
    alpha = _alphas(mu.G, N, prec) if mu.G is not None else [mpmath.mpf(0)] * (N + 1)
    if mu.w is not None and not mu.w.is_zero():
        what = [_what(mu.w, k, prec) for k in range(N + 1)]
    else:
        what = [mpmath.mpc(0)] * (N + 1)
    with mpmath.workprec(prec + 16):
        # index k + N holds w^(k) for -N <= k <= N
        full = [mpmath.conj(what[N - i]) for i in range(N)] + what
        table = np.array([to_mpc(z, prec + 16) for z in full], dtype=object)
        idx = np.arange(N + 1)
        M = table[(idx[:, None] - idx[None, :]) + N]
        with gmpy2.context(gmpy2.get_context(), precision=prec + 16):
            for n in range(N + 1):
                M[n, n] = M[n, n] + to_mpc(alpha[n], prec + 16)
        pre = [float(M[n, n].real) for n in range(N + 1)]
    return GramSystem(mu, N, alpha, what, prec, M, pre)


def _factor(mu: MeasureSpec, N: int, precision: int):
    def build(prec):
        gs = gram(mu, N, prec)
        return {"matrix": gs.matrix, "gram": gs}

    fac, data, tried = factor_with_escalation(build, start=precision)
    return fac, data["gram"], tried


def _distances(fac: Factorization, gs: GramSystem, t: TargetSpec):
    prec = fac.precision
    b = t.b_vector(gs.mu.w, gs.N, prec)
    norm2 = t.norm2(gs.mu.w, prec)
    bb = [to_mpc(x, prec + 16) for x in b]
    q = fac.quadratic_form_partials(bb)
    with mpmath.workprec(prec + 16):
        d2 = [norm2 - to_mpf(x) for x in q]
    return d2, norm2


@dataclass
class DistanceProfile:
    """Distances ``d_N`` with condition estimates; the plateau is exploratory."""

    target: str
    rows: list
    precision: int
    escalations: list
    monotone: bool
    strictly_decreasing: bool
    plateau: float | None
    min_d2_before_clamp: float

    def values(self) -> list:
        return [r["d_N"] for r in self.rows]

    def as_rows(self) -> list:
        return [(r["N"], r["d_N"], r["cond_est"]) for r in self.rows]


def _clamp(d2, norm2, prec: int):
    tol = max(1e-12, float(abs(norm2)) * 2.0 ** (-prec / 2))
    if d2 < 0:
        if d2 < -tol:
            return None
        return mpmath.mpf(0)
    return d2


def distance(gs: GramSystem, t: TargetSpec) -> float:
    """``d_N`` at the system's degree, escalating precision when needed."""
    return splitting_profile(gs.mu, t, [gs.N], gs.precision).rows[-1]["d_N"]


def splitting_profile(mu: MeasureSpec, t: TargetSpec, N_list, precision: int = 128) -> DistanceProfile:
    """Distances for every degree in ``N_list`` from one factorisation.

    Precision climbs the ladder when a pivot fails, the condition estimate
    leaves too little headroom, or a squared distance goes negative beyond
    rounding.
    """
    N_list = sorted(set(int(n) for n in N_list))
    if not N_list:
        return DistanceProfile(t.label, [], precision, [], True, True, None, 0.0)
    Nmax = N_list[-1]
    prec = int(precision)
    escalations = []
    while True:
        fac, gs, tried = _factor(mu, Nmax, prec)
        escalations += [p for p in tried if p not in escalations]
        d2, norm2 = _distances(fac, gs, t)
        clamped = [_clamp(x, norm2, fac.precision) for x in d2]
        if all(c is not None for c in clamped) or fac.precision >= 512:
            break
        prec = fac.precision * 2
    cond = fac.cond_estimates()
    rows = []
    with mpmath.workprec(fac.precision + 16):
        for N in N_list:
            c = clamped[N]
            dN = float(mpmath.sqrt(c)) if c is not None else math.nan
            rows.append({"N": N, "d_N": dN, "d2": float(d2[N]), "cond_est": float(cond[N])})
    vals = [r["d_N"] for r in rows]
    mono = all(b <= a for a, b in zip(vals, vals[1:]))
    strict = all(b < a for a, b in zip(vals, vals[1:]))
    return DistanceProfile(
        t.label,
        rows,
        fac.precision,
        escalations,
        mono,
        strict,
        _plateau(vals),
        float(min(d2)),
    )


def _plateau(vals):
    """Aitken extrapolation of the last three values (exploratory)."""
    if len(vals) < 3:
        return None
    a, b, c = vals[-3:]
    den = c - 2 * b + a
    if den == 0 or not math.isfinite(den):
        return c
    lim = (a * c - b * b) / den
    return lim if 0 <= lim <= c else c


# --------------------------------------------------------------------------
# majorant


def _sinc_product(n: np.ndarray, widths: np.ndarray) -> np.ndarray:
    x = 2 * np.pi * np.outer(n, widths)
    return np.prod(np.sinc(x / np.pi), axis=1)


@dataclass
class Majorant:
    """Bump ``h`` on ``J``: a scaled convolution of ``K`` normalised boxes.

    ``coefficients[n]`` is ``h_n`` for ``0 <= n <= N_ext``; negative indices
    follow from ``h`` being real.
    """

    J: Arc
    centre: float
    K: int
    widths: list
    scale: mpmath.mpf
    coefficients: list
    bounds: list
    N_max: int
    max_ratio: float
    tail_slope: float
    centre_value: float
    support_half_width: float
    refined: bool
    precision: int

    def h(self, n: int):
        return self.coefficients[n] if n >= 0 else mpmath.conj(self.coefficients[-n])

    def phi_float(self, n) -> np.ndarray:
        """Unscaled transform ``prod sinc(2 pi n a_k)`` in floats."""
        return _sinc_product(np.abs(np.asarray(n, dtype=float)), np.array(self.widths))

    def samples(self, m: int = 1 << 17) -> tuple[np.ndarray, np.ndarray]:
        """``h`` on ``m`` equispaced angles from its Fourier series."""
        n = np.arange(m // 2)
        c = float(self.scale) * self.phi_float(n) * np.exp(-2j * np.pi * n * self.centre)
        full = np.zeros(m, dtype=complex)
        full[: m // 2] = c
        full[m // 2 + 1 :] = np.conj(c[1:][::-1])[: m - m // 2 - 1]
        t = np.arange(m) / m
        return t, np.real(np.fft.ifft(full) * m)

    def l2_norm2(self, terms: int = 1 << 16) -> float:
        """``sum_{n in Z} |h_n|^2`` by Parseval."""
        phi = self.phi_float(np.arange(terms))
        return float(self.scale) ** 2 * (phi[0] ** 2 + 2 * math.fsum(phi[1:] ** 2))


def bm_majorant(G: RadialWeight, J: Arc, N_max: int = 200, K: int = 64, precision: int = 128,
                N_ext: int | None = None) -> Majorant:
    """Coefficients of a bump supported in ``J`` with ``|h_n| <= alpha_n / (1 + n)``.

    Box half-widths are ``a_k = 3 |J| k^-2 / pi^2`` for ``k <= K``, so their
    sum stays below ``|J| / 2``.  The scale is the largest constant that
    keeps the majorisation on ``|n| <= N_max``.  If no positive scale works
    the box count is doubled once.
    """
    if J.length <= 0:
        raise DomainError("J must have positive length")
    if not check_loglog_int(G).holds:
        raise DomainError("the radial weight fails the log-log integrability condition")
    N_ext = max(N_ext or N_max, N_max)
    prec = int(precision)
    refined = False
    for attempt in range(2):
        try:
            maj = _majorant_once(G, J, N_max, N_ext, K, prec)
            maj.refined = refined
            return maj
        except MajorizationFailure:
            if attempt:
                raise
            K *= 2
            refined = True
    raise AssertionError("unreachable")


def _majorant_once(G, J, N_max, N_ext, K, prec):
    Jlen = _frac_mp(J.length)
    centre = J.start + J.length / 2
    with mpmath.workprec(prec + 16):
        a = [3 * Jlen / (mpmath.pi**2 * k * k) for k in range(1, K + 1)]
        c_mp = _frac_mp(centre)

        def phi(n):
            if n == 0:
                return mpmath.mpf(1)
            return mpmath.fprod(mpmath.sincpi(2 * n * ak) for ak in a)

        phis = [phi(n) for n in range(N_ext + 1)]
        alpha = _alphas(G, N_ext, prec)
        bounds = [alpha[n] / (1 + n) for n in range(N_ext + 1)]
        ratios = [bounds[n] / abs(phis[n]) for n in range(N_max + 1) if phis[n] != 0]
        s = min(ratios) * (1 - mpmath.mpf(2) ** (-prec // 2))
        if not (s > 0 and mpmath.isfinite(s)):
            raise MajorizationFailure("no positive scale majorises the coefficients on range")
        coeffs = [s * phis[n] * mpmath.expjpi(-2 * n * c_mp) for n in range(N_ext + 1)]
        max_ratio = max(float(abs(coeffs[n]) / bounds[n]) for n in range(N_max + 1))
        lo = max(1, N_max // 10)
        x = np.log(np.arange(lo, N_max + 1, dtype=float))
        y = np.array([float(mpmath.log(abs(coeffs[n]))) if coeffs[n] != 0 else -np.inf
                      for n in range(lo, N_max + 1)])
        ok = np.isfinite(y)
        slope = float(np.polyfit(x[ok], y[ok], 1)[0]) if ok.sum() >= 2 else math.nan
        half = float(sum(a))
        widths = [float(ak) for ak in a]
    n = np.arange(1 << 16)
    ph = _sinc_product(n, np.array(widths))
    centre_value = float(s) * (1 + 2 * math.fsum(ph[1:]))
    return Majorant(J, float(centre), K, widths, s, coeffs, bounds, N_max, max_ratio, slope,
                    centre_value, half, False, prec)


# --------------------------------------------------------------------------
# annihilator tuples


def _middle_third(I: Arc) -> Arc:
    third = I.length / 3
    return Arc(I.start + third, I.start + 2 * third)


def _constant_on(w: BoundaryWeight, arc: Arc):
    """The value of ``w`` if it is a positive constant on ``arc``, else ``None``."""
    vals = set()
    for parc, p in w.pieces:
        if parc.intersect(arc):
            if not isinstance(p, Const):
                return None
            vals.add(float(p.v))
    return vals.pop() if len(vals) == 1 else None


def _exp_series(l: np.ndarray, K: int) -> np.ndarray:
    """Taylor coefficients of ``exp(sum l_k z^k)`` up to degree ``K``."""
    u = np.zeros(K + 1, dtype=complex)
    u[0] = np.exp(l[0])
    k = np.arange(1, K + 1)
    kl = k * l[1 : K + 1]
    for n in range(1, K + 1):
        u[n] = np.dot(kl[:n], u[n - 1 :: -1][:n]) / n
    return u


@dataclass
class AnnihilatorTuple:
    """``(f_D, f_T)`` orthogonal to polynomials up to degree ``N_max``.

    ``f_D = sum c_n z^n`` and ``f_T = h conj(u) / w`` on ``I``.  With
    ``exact`` set, ``u = 1`` and ``w`` is constant on ``I``, so every inner
    product is evaluated from coefficients; otherwise ``f_T`` is sampled.
    """

    I: Arc
    J: Arc
    majorant: Majorant
    N_max: int
    N_ext: int
    F: list
    c: list
    alpha: list
    exact: bool
    w_value: float | None
    u_info: dict
    residuals: list
    disk_norm2: float
    boundary_norm2: float
    F_norm2: float
    F_norm_bound: float
    carrier_min: float
    precision: int
    grid: dict = field(default_factory=dict, repr=False)

    @property
    def norm(self) -> float:
        return math.sqrt(self.disk_norm2 + self.boundary_norm2)

    @property
    def max_residual(self) -> float:
        return max(self.residuals) if self.residuals else 0.0

    @property
    def residual_ok(self) -> bool:
        return self.max_residual <= 1e-10 * self.norm

    @property
    def F_bound_ok(self) -> bool:
        return self.F_norm2 <= self.F_norm_bound

    def extension_norm2(self, N: int) -> float:
        """``sum_{N_max < n <= N} |c_n|^2 alpha_n`` for degrees past ``N_max``."""
        if N <= self.N_max:
            return 0.0
        if N > self.N_ext:
            raise DomainError(f"tuple extended only to degree {self.N_ext}")
        with mpmath.workprec(self.precision + 16):
            return float(mpmath.fsum(abs(self.c[n]) ** 2 * self.alpha[n]
                                     for n in range(self.N_max + 1, N + 1)))

    def summary(self) -> dict:
        return {
            "I": [str(self.I.start), str(self.I.end)],
            "J": [str(self.J.start), str(self.J.end)],
            "N_max": self.N_max,
            "N_ext": self.N_ext,
            "boxes": self.majorant.K,
            "scale": float(self.majorant.scale),
            "max_coefficient_ratio": self.majorant.max_ratio,
            "tail_slope": self.majorant.tail_slope,
            "h_centre": self.majorant.centre_value,
            "support_half_width": self.majorant.support_half_width,
            "exact": self.exact,
            "u": self.u_info,
            "max_residual": self.max_residual,
            "tuple_norm": self.norm,
            "residual_ok": self.residual_ok,
            "F_norm2": self.F_norm2,
            "F_norm_bound": self.F_norm_bound,
            "F_bound_ok": self.F_bound_ok,
            "carrier_min": self.carrier_min,
        }

    def coefficient_rows(self) -> list:
        return [
            (n, float(abs(self.majorant.coefficients[n])), float(self.majorant.bounds[n]),
             float(abs(self.F[n])), self.residuals[n])
            for n in range(self.N_max + 1)
        ]


def annihilator(mu: MeasureSpec, I: Arc, N_max: int = 200, precision: int = 128,
                N_ext: int | None = None, resolution: int = 64, boxes: int = 64) -> AnnihilatorTuple:
    """Build the tuple ``(f_D, f_T)`` on ``I`` with ``J`` the middle third of ``I``.

    ``F_n = -h_n / alpha_n``; the disk part is the projection of
    ``F conj(u)`` onto the monomials, whose coefficients follow from the
    Taylor coefficients of ``u`` as ``c_n alpha_n = -sum_k h_{n+k} conj(u_k)``.
    """
    if mu.G is None:
        raise DomainError("an annihilator needs a disk part")
    w = mu.w if mu.w is not None else BoundaryWeight.zero()
    if szego_mean(w, CircleSet(arcs=(I,))).log_integral == -math.inf:
        raise NotLogIntegrable("log w is not integrable over the arc")
    N_ext = max(N_ext or 2 * N_max, N_max)
    prec = int(precision)
    J = _middle_third(I)
    maj = bm_majorant(mu.G, J, N_max, boxes, prec, N_ext)
    prof, l1_err = log_modulus_profile(w, I, resolution)
    v = _constant_on(w, I)
    exact = len(prof) == 0 and v is not None
    with mpmath.workprec(prec + 16):
        alpha = _alphas(mu.G, N_ext, prec)
        h = maj.coefficients
        F = [-h[n] / alpha[n] for n in range(N_ext + 1)]
        grid = {}
        if exact:
            c = F
            boundary = [mpmath.conj(h[n]) for n in range(N_max + 1)]
            bnorm2 = maj.l2_norm2() / v
            u_info = {"kind": "identity", "l1_error": 0.0}
        else:
            c, boundary, bnorm2, u_info, grid = _sampled_tuple(w, I, maj, prof, l1_err, alpha, N_ext, N_max)
        residuals = [
            float(abs(mpmath.conj(c[n]) * alpha[n] + boundary[n])) for n in range(N_max + 1)
        ]
        disk2 = float(mpmath.fsum(abs(c[n]) ** 2 * alpha[n] for n in range(N_max + 1)))
        Fn2 = float(mpmath.fsum(abs(F[n]) ** 2 * alpha[n] for n in range(N_max + 1)))
        Fb = float(mpmath.fsum(alpha[n] / (1 + n) ** 2 for n in range(N_max + 1)))
    t, hv = maj.samples()
    # sample the inner 80% of J, where h is resolvable in double precision
    inner = Arc(J.start + J.length / 10, J.end - J.length / 10).contains(t)
    carrier_min = float(np.min(hv[inner])) if inner.any() else 0.0
    if not exact:
        carrier_min = float(np.min(np.abs(grid["fT"][inner])))
    return AnnihilatorTuple(I, J, maj, N_max, N_ext, F, c, alpha, exact, v, u_info, residuals, disk2,
                            float(bnorm2), Fn2, Fb, carrier_min, prec, grid)


def _sampled_tuple(w, I, maj, prof, l1_err, alpha, N_ext, N_max, m: int = 1 << 15):
    """Tuple data with ``u`` from its log-modulus profile, sampled on a grid."""
    Kh = max(4 * N_ext, 2048)
    fhat = profile_fourier(prof, max(Kh, m // 2))
    l = np.zeros(Kh + 1, dtype=complex)
    l[0] = fhat[0]
    l[1:] = 2 * fhat[1 : Kh + 1]
    uk = _exp_series(l, Kh)
    n_all = np.arange(Kh + N_ext + 1)
    hf = float(maj.scale) * maj.phi_float(n_all) * np.exp(-2j * np.pi * n_all * maj.centre)
    c = []
    for n in range(N_ext + 1):
        cn_alpha = -np.dot(hf[n : n + Kh + 1], np.conj(uk))
        c.append(mpmath.mpc(complex(cn_alpha)) / alpha[n])
    # boundary values of u = exp(f + i f~) from the coefficients of f
    spec = np.zeros(m, dtype=complex)
    spec[0] = fhat[0]
    spec[1 : m // 2] = 2 * fhat[1 : m // 2]
    t = np.arange(m) / m
    logu = np.fft.ifft(spec) * m
    u = np.exp(logu)
    _, hv = maj.samples(m)
    wv = w.value(t)
    onI = I.contains(t)
    fT = np.zeros(m, dtype=complex)
    fT[onI] = hv[onI] * np.conj(u[onI]) / wv[onI]
    integrand = np.conj(fT) * wv
    coef = np.fft.ifft(integrand)[: N_max + 1]
    boundary = [mpmath.mpc(complex(z)) for z in coef]
    bnorm2 = float(np.mean(np.abs(fT) ** 2 * wv))
    info = {"kind": "outer", "l1_error": float(l1_err), "grid": m, "taylor_terms": Kh}
    return c, boundary, bnorm2, info, {"t": t, "fT": fT, "w": wv}


# --------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class Certificate:
    """Lower bound on the distance from a target to polynomials of degree ``N``."""

    value: float
    inner: float
    tuple_norm: float
    correction: float
    N: int
    vacuous: bool

    def as_dict(self):
        return {"value": self.value, "inner": self.inner, "tuple_norm": self.tuple_norm,
                "correction": self.correction, "N": self.N, "vacuous": self.vacuous}


def _arc_transform(a: Arc, n: np.ndarray) -> np.ndarray:
    """``int_a e^{-2 pi i n t} dt`` in floats."""
    out = np.zeros(n.shape, dtype=complex)
    for lo, hi in a.pieces():
        lo, hi = float(lo), float(hi)
        nz = n != 0
        out[~nz] += hi - lo
        k = n[nz]
        out[nz] += (np.exp(-2j * np.pi * k * hi) - np.exp(-2j * np.pi * k * lo)) / (-2j * np.pi * k)
    return out


def _target_inner(tup: AnnihilatorTuple, t: TargetSpec, w: BoundaryWeight) -> float:
    """``|<f, (f_D, f_T)>_mu|`` for a boundary target ``f``."""
    if t.kind == "zero":
        return 0.0
    maj = tup.majorant
    supp = t.support_arcs()
    h_supp = Arc(maj.centre - maj.support_half_width, maj.centre + maj.support_half_width)
    if supp is not None and not any(a.intersect(h_supp) for a in supp):
        return 0.0
    if tup.exact:
        if t.kind == "coefficients":
            with mpmath.workprec(tup.precision + 16):
                return float(abs(mpmath.fsum(mpmath.mpc(ck) * mpmath.conj(maj.h(k))
                                             for k, ck in t.coefficients)))
        if t.set.cantor_parts:
            raise UnsupportedProfile("Cantor targets need the sampled tuple")
        m = 1 << 16
        n = np.arange(-m, m + 1)
        hn = float(maj.scale) * maj.phi_float(n) * np.exp(-2j * np.pi * n * maj.centre)
        total = 0j
        for a in t.set.arcs:
            total += np.dot(hn, np.conj(_arc_transform(a, n)))
        return abs(total)
    g = tup.grid
    if t.kind == "coefficients":
        f = sum(c * np.exp(2j * np.pi * k * g["t"]) for k, c in t.coefficients)
    else:
        f = t.set.contains(g["t"]).astype(float)
    return abs(np.mean(f * np.conj(g["fT"]) * g["w"]))


def certificates(tup: AnnihilatorTuple, t: TargetSpec, N_list, w: BoundaryWeight | None = None) -> dict:
    """Certificates for several degrees sharing one inner product."""
    inner = _target_inner(tup, t, w)
    return {int(N): certificate(tup, t, N, w, inner) for N in N_list}


def certificate(tup: AnnihilatorTuple, t: TargetSpec, N: int | None = None,
                w: BoundaryWeight | None = None, inner: float | None = None) -> Certificate:
    """``|<f, Phi_N>| / ||Phi_N||`` with ``Phi_N`` the tuple extended to degree ``N``.

    Past ``N_max`` the disk part is continued by its exact coefficients;
    the added norm is reported as the correction term.
    """
    N = tup.N_max if N is None else int(N)
    if inner is None:
        inner = _target_inner(tup, t, w)
    ext = tup.extension_norm2(N)
    norm = math.sqrt(tup.norm**2 + ext)
    val = inner / norm if norm > 0 else 0.0
    return Certificate(float(val), float(inner), float(norm), math.sqrt(ext), N, bool(inner == 0.0))


# --------------------------------------------------------------------------
# structure prediction


@dataclass(frozen=True)
class Prediction:
    verdict: str
    decomposition: str
    residual_measure: float
    carrier_measure: float
    flags: dict

    def as_dict(self):
        return {"verdict": self.verdict, "decomposition": self.decomposition,
                "residual_measure": self.residual_measure, "carrier_measure": self.carrier_measure,
                **self.flags}


def predict_structure(mu: MeasureSpec) -> Prediction:
    """Predicted decomposition of the polynomial closure from the regime checks."""
    w = mu.w if mu.w is not None else BoundaryWeight.zero()
    res = carrier_and_residual(w)
    Fm, Em = float(res.F.measure), float(res.E.measure)
    if mu.G is None:
        return Prediction("out of scope", "no disk part", Fm, Em, {"expdec": None, "loglog": None})
    ed, ll = check_exp_dec(mu.G), check_loglog_int(mu.G)
    flags = {
        "expdec": ed.holds,
        "expdec_d": ed.d,
        "loglog": ll.holds,
        "loglog_integral": ll.integral,
        "khrushchev_regime": not ed.holds,
        "volberg_regime": ed.holds and not ll.holds,
    }
    full = res.E.measure > 0 and res.F.measure == res.E.measure
    if ed.holds and full:
        return Prediction("full splitting", "P2(mu_D) + L2(w dm)", Fm, Em, flags)
    if ed.holds and ll.holds:
        if res.F.is_empty():
            return Prediction("irreducible", "P2(mu), no L2 summand", Fm, Em, flags)
        return Prediction("splitting", "P2(mu_D + mu_(T-F)) irreducible + L2(mu_F)", Fm, Em, flags)
    return Prediction("out of scope", "undetermined", Fm, Em, flags)
