"""Radial and boundary weights of the measure ``G(1-|z|) dA + w dm``.

The radial part is described by :class:`RadialWeight`, a small parametric
family with evaluable ``m(x) = log(1/G(x))`` and ``m'(x)``.  The boundary
part is a :class:`BoundaryWeight`, a finite list of ``(arc, profile)``
pieces covering the circle.  Log-integrability of every profile over any
arc is decided by analytic rules, never by quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .errors import DomainError, UnsupportedProfile
from .sets import (
    FULL_CIRCLE,
    Arc,
    CantorPart,
    CircleSet,
    FatCantorSpec,
    arcs_disjoint,
    as_fraction,
    circular_distance,
)

__all__ = [
    "RadialWeight",
    "ExpDecResult",
    "LogLogResult",
    "eval_radial",
    "check_exp_dec",
    "check_loglog_int",
    "Profile",
    "Zero",
    "Const",
    "PowerCusp",
    "ExpCusp",
    "ChordPower",
    "CantorIndicator",
    "BoundaryWeight",
    "BoundaryValue",
    "Residual",
    "eval_boundary",
    "carrier_and_residual",
]

RADIAL_FAMILIES = ("power", "expdec", "stretched", "double-exp", "table")


# --------------------------------------------------------------------------
# radial weight


@dataclass(frozen=True)
class RadialWeight:
    """Radial weight ``G`` on ``(0, 1]``.

    Families (``m = log(1/G)`` before normalisation):

    * ``power``       ``G = x**beta``
    * ``expdec``      ``G = exp(-c/x)``
    * ``stretched``   ``G = exp(-c x**-alpha)`` with ``0 < alpha <= 1``
    * ``double-exp``  ``G = exp(-exp(c/x))``
    * ``table``       ``m`` piecewise linear through ``(table_x, table_m)``

    With ``normalize=True`` the weight is multiplied by
    ``min(1, 1/(2 G(1)))`` so that ``G < 1`` on ``(0, 1]`` while weights that
    already satisfy ``G(1) <= 1/2`` are left untouched.  Moments always use
    the unscaled ``G``.
    """

    family: str
    c: float = 1.0
    beta: float = 1.0
    alpha: float = 0.5
    table_x: tuple = ()
    table_m: tuple = ()
    normalize: bool = True

    def __post_init__(self):
        if self.family not in RADIAL_FAMILIES:
            raise DomainError(f"unknown radial family {self.family!r}")
        if self.family in ("expdec", "stretched", "double-exp") and not self.c > 0:
            raise DomainError("parameter c must be positive")
        if self.family == "power" and not self.beta >= 0:
            raise DomainError("parameter beta must be nonnegative")
        if self.family == "stretched" and not 0 < self.alpha <= 1:
            raise DomainError("parameter alpha must lie in (0, 1]")
        if self.family == "table":
            xs, ms = tuple(map(float, self.table_x)), tuple(map(float, self.table_m))
            if len(xs) < 1 or len(xs) != len(ms):
                raise DomainError("table needs matching nonempty x and m lists")
            if any(not 0 < x <= 1 for x in xs) or any(b <= a for a, b in zip(xs, xs[1:])):
                raise DomainError("table x must be strictly increasing in (0, 1]")
            if any(b > a for a, b in zip(ms, ms[1:])) or min(ms) < 0:
                raise DomainError("table m must be nonnegative and nonincreasing")
            object.__setattr__(self, "table_x", xs)
            object.__setattr__(self, "table_m", ms)

    # constructors
    @classmethod
    def power(cls, beta, normalize=True):
        return cls("power", beta=float(beta), normalize=normalize)

    @classmethod
    def expdec(cls, c=1.0, normalize=True):
        return cls("expdec", c=float(c), normalize=normalize)

    @classmethod
    def stretched(cls, c, alpha, normalize=True):
        return cls("stretched", c=float(c), alpha=float(alpha), normalize=normalize)

    @classmethod
    def double_exp(cls, c=1.0, normalize=True):
        return cls("double-exp", c=float(c), normalize=normalize)

    @classmethod
    def table(cls, xs, ms, normalize=True):
        return cls("table", table_x=tuple(xs), table_m=tuple(ms), normalize=normalize)

    def key(self) -> str:
        if self.family == "power":
            body = f"beta={self.beta!r}"
        elif self.family == "expdec":
            body = f"c={self.c!r}"
        elif self.family == "stretched":
            body = f"c={self.c!r},alpha={self.alpha!r}"
        elif self.family == "double-exp":
            body = f"c={self.c!r}"
        else:
            body = f"x={self.table_x!r},m={self.table_m!r}"
        return f"{self.family}({body};normalize={self.normalize})"

    @property
    def has_derivative(self) -> bool:
        return self.family != "table"

    # raw log-weight, evaluated in mpmath at the ambient precision
    def m_raw_mp(self, x):
        x = mpmath.mpf(x)
        f = self.family
        if f == "power":
            return -self.beta * mpmath.log(x)
        if f == "expdec":
            return self.c / x
        if f == "stretched":
            return self.c * x ** (-self.alpha)
        if f == "double-exp":
            return mpmath.exp(self.c / x)
        return mpmath.mpf(self._table_m(float(x)))

    def dm_mp(self, x):
        x = mpmath.mpf(x)
        f = self.family
        if f == "power":
            return -self.beta / x
        if f == "expdec":
            return -self.c / x**2
        if f == "stretched":
            return -self.c * self.alpha * x ** (-self.alpha - 1)
        if f == "double-exp":
            return -self.c / x**2 * mpmath.exp(self.c / x)
        return mpmath.mpf(self._table_dm(float(x)))

    def _table_m(self, x):
        return float(np.interp(x, self.table_x, self.table_m))

    def _table_dm(self, x):
        xs, ms = self.table_x, self.table_m
        if x <= xs[0] or x >= xs[-1]:
            return 0.0
        i = int(np.searchsorted(xs, x, side="right")) - 1
        return (ms[i + 1] - ms[i]) / (xs[i + 1] - xs[i])

    def shift_mp(self):
        """``log(1/scale)``: the constant added to ``m`` by normalisation."""
        if not self.normalize:
            return mpmath.mpf(0)
        return max(mpmath.mpf(0), mpmath.log(2) - self.m_raw_mp(1))

    def m_mp(self, x):
        return self.m_raw_mp(x) + self.shift_mp()

    def m(self, x) -> float:
        with mpmath.workprec(64):
            return float(self.m_mp(x))

    def dm(self, x) -> float:
        with mpmath.workprec(64):
            return float(self.dm_mp(x))

    def log_G_raw_mp(self, x):
        return -self.m_raw_mp(x)

    def G(self, x) -> float:
        with mpmath.workprec(64):
            return float(mpmath.exp(-self.m_mp(x)))

    def G_raw(self, x) -> float:
        with mpmath.workprec(64):
            return float(mpmath.exp(-self.m_raw_mp(x)))


def _check_x(x):
    x = float(x)
    if not (0 < x <= 1) or math.isnan(x):
        raise DomainError(f"radial argument must lie in (0, 1], got {x!r}")
    return x


def eval_radial(G: RadialWeight, x) -> float:
    """Normalised ``G(x)`` for ``x`` in ``(0, 1]``."""
    return G.G(_check_x(x))


@dataclass(frozen=True)
class ExpDecResult:
    holds: bool
    d: float
    method: str
    grid_floor: float | None = None


def check_exp_dec(G: RadialWeight, levels: int = 40) -> ExpDecResult:
    """Decide ``d = inf_{0<x<=1} x m(x) > 0``.

    Closed forms cover the built-in families; tables are sampled on a
    refining dyadic grid and reported as an estimate.
    """
    with mpmath.workprec(64):
        s = float(G.shift_mp())
    f = G.family
    if f == "power":
        d = 0.0
    elif f == "expdec":
        d = G.c  # x (c/x + s) = c + s x
    elif f == "stretched":
        d = G.c if G.alpha == 1 else 0.0
    elif f == "double-exp":
        # x exp(c/x) + s x is minimised at x = c when c <= 1
        d = math.e * G.c + s * G.c if G.c <= 1 else math.exp(G.c) + s
    else:
        floor = 1.0
        best = math.inf
        for lev in range(1, levels + 1):
            xs = np.arange(1, 2**min(lev, 16) + 1) / 2.0**min(lev, 16) * 2.0 ** -(lev - min(lev, 16))
            vals = xs * (np.interp(xs, G.table_x, G.table_m) + s)
            best = min(best, float(vals.min()))
            floor = float(xs[0])
        return ExpDecResult(best > 0, best, "grid estimate", floor)
    return ExpDecResult(d > 0, d, "closed form")


@dataclass(frozen=True)
class LogLogResult:
    holds: bool
    integral: float
    error: float
    method: str


def check_loglog_int(G: RadialWeight) -> LogLogResult:
    """``int_0^1 log m(x) dx`` with an error estimate; ``+inf`` if divergent."""
    f = G.family
    with mpmath.workprec(80):
        s = G.shift_mp()
        if f == "double-exp":
            # log m = c/x, not integrable at 0
            return LogLogResult(False, math.inf, 0.0, "closed form")
        if f == "expdec" and s == 0:
            val = mpmath.log(G.c) + 1
            return LogLogResult(True, float(val), 0.0, "closed form")
        if f == "table" and G.m_mp(mpmath.mpf(G.table_x[0]) / 2) <= 0:
            return LogLogResult(False, -math.inf, 0.0, "table with m = 0 near 0")
        pts = [0, 1]
        if f == "table":
            pts = sorted(set([0.0, *G.table_x, 1.0]))
        val, err = mpmath.quad(lambda x: mpmath.log(G.m_mp(x)), pts, error=True)
    return LogLogResult(bool(mpmath.isfinite(val)), float(val), float(err), "quadrature")


# --------------------------------------------------------------------------
# boundary profiles


def _plain(a, b):
    """Validate a plain sub-interval ``[a, b)`` of a piece (turn units)."""
    a, b = float(a), float(b)
    if b < a:
        raise DomainError("interval end before start")
    return a, b


def _dist_breaks(t0, a, b):
    """Breakpoints of the circular distance to ``t0`` inside ``[a, b]``."""
    pts = {a, b}
    for base in (t0, t0 + 0.5):
        k0 = math.floor(a - base)
        for k in range(k0, k0 + int(b - a) + 3):
            p = base + k
            if a < p < b:
                pts.add(p)
    return sorted(pts)


class Profile:
    """Base class for boundary profiles.

    Subclasses must provide a log-integrability rule; a profile that does
    not is rejected by :func:`carrier_and_residual`.
    """

    kind = "custom"

    def value(self, t):
        raise NotImplementedError

    def log_divergent(self, a, b) -> bool:
        raise UnsupportedProfile(f"profile {type(self).__name__} has no log-integrability rule")

    def positive_part(self, arc: Arc) -> CircleSet:
        raise UnsupportedProfile(f"profile {type(self).__name__} has no carrier rule")

    def residual_part(self, arc: Arc) -> CircleSet:
        raise UnsupportedProfile(f"profile {type(self).__name__} has no residual rule")

    def describe(self) -> dict:
        return {"kind": self.kind}


@dataclass(frozen=True)
class Zero(Profile):
    kind = "zero"

    def value(self, t):
        return np.zeros(np.shape(t))

    def integral(self, a, b):
        return mpmath.mpf(0)

    def log_integral(self, a, b):
        return -mpmath.inf if b > a else mpmath.mpf(0)

    def log_divergent(self, a, b):
        return b > a

    def positive_part(self, arc):
        return CircleSet()

    def residual_part(self, arc):
        return CircleSet()

    def fourier(self, n, a, b):
        return mpmath.mpc(0)


@dataclass(frozen=True)
class Const(Profile):
    v: float = 1.0
    kind = "const"

    def __post_init__(self):
        if not self.v > 0:
            raise DomainError("constant profile needs v > 0 (use Zero otherwise)")

    def value(self, t):
        return np.full(np.shape(t), float(self.v))

    def integral(self, a, b):
        return mpmath.mpf(self.v) * (_frac_mp(b) - _frac_mp(a))

    def log_integral(self, a, b):
        return mpmath.log(self.v) * (_frac_mp(b) - _frac_mp(a))

    def log_divergent(self, a, b):
        return False

    def positive_part(self, arc):
        return CircleSet(arcs=(arc,))

    def residual_part(self, arc):
        return CircleSet()

    def fourier(self, n, a, b):
        return mpmath.mpf(self.v) * _exp_integral(n, a, b)

    def describe(self):
        return {"kind": self.kind, "v": self.v}


def _exp_integral(n, a, b):
    """``int_a^b exp(-2 pi i n t) dt`` in closed form."""
    if n != 0 and isinstance(a, Fraction) and isinstance(b, Fraction) and (n * (b - a)).denominator == 1:
        return mpmath.mpc(0)
    a, b = _frac_mp(a), _frac_mp(b)
    if n == 0:
        return mpmath.mpc(b - a)
    w = -2j * mpmath.pi * n
    # e^{wa} (e^{w(b-a)} - 1)/w, with expm1 for short intervals
    return mpmath.exp(w * a) * mpmath.expm1(w * (b - a)) / w


def _quad_fourier(func, n, pts):
    """Oscillatory quadrature of ``func(t) exp(-2 pi i n t)``; returns (value, error)."""
    nodes = []
    for lo, hi in zip(pts, pts[1:]):
        m = max(1, int(abs(n) * (hi - lo)) + 1)
        nodes.extend(lo + (hi - lo) * mpmath.mpf(j) / m for j in range(m))
    nodes.append(pts[-1])
    f = lambda t: func(t) * mpmath.expjpi(-2 * n * t)
    return mpmath.quad(f, nodes, error=True)


@dataclass(frozen=True)
class _Cusp(Profile):
    t0: float = 0.0
    exponent: float = 1.0
    scale: float = 1.0

    def _delta(self, t):
        return 2 * np.pi * circular_distance(t, self.t0)

    def _delta_mp(self, t):
        d = (mpmath.mpf(t) - self.t0) % 1
        return 2 * mpmath.pi * min(d, 1 - d)

    def integral(self, a, b):
        return mpmath.quad(self.value_mp, _dist_breaks(self.t0, float(a), float(b)))

    def fourier(self, n, a, b):
        """Coefficient over ``[a, b)`` by quadrature, as ``(value, error)``."""
        return _quad_fourier(self.value_mp, n, _dist_breaks(self.t0, float(a), float(b)))

    def _contains_t0(self, a, b):
        # closed interval [a, b] meets t0 modulo 1
        return math.floor(b - self.t0) >= math.ceil(a - self.t0)

    def describe(self):
        return {"kind": self.kind, "t0": self.t0, "exponent": self.exponent, "scale": self.scale}


@dataclass(frozen=True)
class PowerCusp(_Cusp):
    """``scale * delta**p`` with ``delta`` the radian distance to ``t0``."""

    kind = "power-cusp"

    def __post_init__(self):
        if not self.exponent > -1 or not self.scale > 0:
            raise DomainError("power cusp needs p > -1 and scale > 0")

    def value(self, t):
        with np.errstate(divide="ignore"):
            return self.scale * self._delta(t) ** self.exponent

    def value_mp(self, t):
        return self.scale * self._delta_mp(t) ** self.exponent

    def log_integral(self, a, b):
        a, b = _plain(a, b)
        pts = _dist_breaks(self.t0, a, b)
        # distance is linear with unit slope between breakpoints
        prim = lambda u: u * mpmath.log(2 * mpmath.pi * u) - u if u > 0 else mpmath.mpf(0)
        total = mpmath.mpf(0)
        for lo, hi in zip(pts, pts[1:]):
            u0 = self._delta_mp(lo) / (2 * mpmath.pi)
            u1 = self._delta_mp(hi) / (2 * mpmath.pi)
            total += prim(max(u0, u1)) - prim(min(u0, u1))
        return mpmath.log(self.scale) * (b - a) + self.exponent * total

    def log_divergent(self, a, b):
        return False

    def positive_part(self, arc):
        return CircleSet(arcs=(arc,))

    def residual_part(self, arc):
        return CircleSet()


@dataclass(frozen=True)
class ExpCusp(_Cusp):
    """``scale * exp(-delta**-q)``; log-divergent near ``t0`` iff ``q >= 1``."""

    kind = "exp-cusp"

    def __post_init__(self):
        if not self.exponent > 0 or not self.scale > 0:
            raise DomainError("exp cusp needs q > 0 and scale > 0")

    def value(self, t):
        d = self._delta(t)
        with np.errstate(divide="ignore"):
            return self.scale * np.exp(-(d ** -self.exponent))

    def value_mp(self, t):
        d = self._delta_mp(t)
        if d == 0:
            return mpmath.mpf(0)
        return self.scale * mpmath.exp(-(d ** -self.exponent))

    def log_value_mp(self, t):
        d = self._delta_mp(t)
        return mpmath.log(self.scale) - d ** -self.exponent

    def log_divergent(self, a, b):
        a, b = _plain(a, b)
        return self.exponent >= 1 and b > a and self._contains_t0(a, b)

    def log_integral(self, a, b):
        a, b = _plain(a, b)
        if self.log_divergent(a, b):
            return -mpmath.inf
        q = mpmath.mpf(self.exponent)
        pts = _dist_breaks(self.t0, a, b)
        total = mpmath.mpf(0)
        for lo, hi in zip(pts, pts[1:]):
            u0 = self._delta_mp(lo) / (2 * mpmath.pi)
            u1 = self._delta_mp(hi) / (2 * mpmath.pi)
            u0, u1 = min(u0, u1), max(u0, u1)
            total += self.cusp_integral(u0, u1)
        return mpmath.log(self.scale) * (b - a) - total

    def cusp_integral(self, u0, u1):
        """``int_{u0}^{u1} (2 pi u)**-q du`` for distances ``u`` in turns."""
        q = mpmath.mpf(self.exponent)
        tp = 2 * mpmath.pi
        if u1 <= u0:
            return mpmath.mpf(0)
        if q == 1:
            if u0 == 0:
                return mpmath.inf
            return (mpmath.log(u1) - mpmath.log(u0)) / tp
        if q > 1 and u0 == 0:
            return mpmath.inf
        return tp ** (-q) * (u1 ** (1 - q) - u0 ** (1 - q)) / (1 - q)

    def positive_part(self, arc):
        return CircleSet(arcs=(arc,))

    def residual_part(self, arc):
        return CircleSet()


@dataclass(frozen=True)
class ChordPower(_Cusp):
    """``scale * |2 sin(pi (t - t0))|**p``, i.e. ``scale * |z - z0|**p``."""

    kind = "chord-power"

    def __post_init__(self):
        if not self.exponent > -1 or not self.scale > 0:
            raise DomainError("chord power needs p > -1 and scale > 0")

    def value(self, t):
        with np.errstate(divide="ignore"):
            chord = np.abs(2 * np.sin(np.pi * (np.asarray(t, dtype=float) - self.t0)))
            return self.scale * chord**self.exponent

    def value_mp(self, t):
        return self.scale * abs(2 * mpmath.sinpi(mpmath.mpf(t) - self.t0)) ** self.exponent

    def log_integral(self, a, b):
        a, b = _plain(a, b)
        tp = 2 * mpmath.pi
        cl = lambda t: mpmath.clsin(2, tp * (mpmath.mpf(t) - self.t0))
        return mpmath.log(self.scale) * (b - a) - self.exponent * (cl(b) - cl(a)) / tp

    def log_divergent(self, a, b):
        return False

    def positive_part(self, arc):
        return CircleSet(arcs=(arc,))

    def residual_part(self, arc):
        return CircleSet()


@dataclass(frozen=True)
class CantorIndicator(Profile):
    """``v`` times the indicator of a fat Cantor limit set.

    Membership and integrals are realised at ``stage``; the resulting
    error in any integral of the profile is at most ``v |E - E_stage|``.
    """

    spec: FatCantorSpec = field(default_factory=FatCantorSpec)
    v: float = 1.0
    stage: int = 20
    kind = "cantor-indicator"

    def __post_init__(self):
        if not self.v > 0 or self.stage < 0:
            raise DomainError("cantor indicator needs v > 0 and stage >= 0")

    def membership(self, t):
        """``(inside, resolved)`` for angles ``t``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        inside, gap = self.spec.locate(t, self.stage)
        resolved = ~inside
        if inside.any():
            # stage-arc endpoints belong to the limit set
            L = float(self.spec.arc_length(self.stage))
            starts = self.spec.stage_starts_float(self.stage)
            rel = np.mod(t[inside] - starts[0], 1.0)
            idx = np.searchsorted(np.mod(starts - starts[0], 1.0), rel, side="right") - 1
            off = rel - np.mod(starts[idx] - starts[0], 1.0)
            resolved[inside] = np.isclose(off, 0.0, atol=1e-15) | np.isclose(off, L, atol=1e-15)
        return inside, resolved

    def value(self, t):
        return np.where(self.membership(t)[0], float(self.v), 0.0)

    @property
    def part(self) -> CantorPart:
        return CantorPart(self.spec, self.stage)

    def measure_in(self, a, b, limit: bool = True) -> Fraction:
        """Measure of ``E ∩ [a, b)`` (limit set, or stage set if not ``limit``).

        Recurses through the tree; nodes below ``stage`` that straddle an
        endpoint are split proportionally, which is exact for the stage set.
        """
        a, b = as_fraction(a), as_fraction(b)
        total = Fraction(0)
        sp = self.spec
        for shift in (-1, 0, 1):
            total += _tree_measure(sp, self.stage, sp.base.start + shift, 0, a, b, limit)
        return total

    def integral(self, a, b):
        return mpmath.mpf(self.v) * _frac_mp(self.measure_in(a, b, limit=False))

    def log_integral(self, a, b):
        return -mpmath.inf if b > a else mpmath.mpf(0)

    def log_divergent(self, a, b):
        # the limit set has empty interior, so every arc meets the zero set
        return b > a

    def positive_part(self, arc):
        return CircleSet(cantor_parts=(self.part,))

    def residual_part(self, arc):
        return CircleSet(cantor_parts=(self.part,))

    def fourier(self, n, a=None, b=None):
        """Coefficient of the stage set over the whole piece (closed form)."""
        sp = self.spec
        k = self.stage
        v = mpmath.mpf(self.v)
        if n == 0:
            return mpmath.mpc(v * _frac_mp(sp.stage_measure(k)))
        centre = _frac_mp(sp.base.start) + _frac_mp(sp.base.length) / 2
        prod = mpmath.mpf(1)
        for j in range(1, k + 1):
            prod *= mpmath.cospi(2 * n * _frac_mp(sp.child_offset(j)))
        L = _frac_mp(sp.arc_length(k))
        body = 2**k * prod * mpmath.sinpi(n * L) / (mpmath.pi * n)
        return v * mpmath.expjpi(-2 * n * centre) * body

    def describe(self):
        sp = self.spec
        return {
            "kind": self.kind,
            "v": self.v,
            "stage": self.stage,
            "base": [str(sp.base.start), str(sp.base.end)],
            "schedule": sp.schedule,
            "parameter": str(sp.parameter),
        }


def _frac_mp(q):
    """Fraction (or any real) to an mpmath number at the ambient precision."""
    if isinstance(q, Fraction):
        return mpmath.mpf(q.numerator) / q.denominator
    return mpmath.mpf(q)


def _tree_measure(sp, stage, start, level, a, b, limit):
    length = sp.arc_length(level)
    end = start + length
    lo, hi = max(start, a), min(end, b)
    if hi <= lo:
        return Fraction(0)
    if lo == start and hi == end:
        return sp.node_limit_measure(level) if limit else sp.arc_length(stage) * 2 ** (stage - level)
    if level == stage:
        if limit:
            return (hi - lo) / length * sp.node_limit_measure(level)
        return hi - lo
    shift = length - sp.arc_length(level + 1)
    return _tree_measure(sp, stage, start, level + 1, a, b, limit) + _tree_measure(
        sp, stage, start + shift, level + 1, a, b, limit
    )


# --------------------------------------------------------------------------
# boundary weight


@dataclass(frozen=True)
class BoundaryWeight:
    """Piecewise boundary weight: disjoint ``(arc, profile)`` pieces covering the circle."""

    pieces: tuple = ()

    def __post_init__(self):
        pieces = tuple((a if isinstance(a, Arc) else Arc(*a), p) for a, p in self.pieces)
        object.__setattr__(self, "pieces", pieces)
        arcs = [a for a, _ in pieces]
        if not arcs_disjoint(arcs) or sum((a.length for a in arcs), Fraction(0)) != 1:
            raise DomainError("boundary pieces must be disjoint and cover the circle")
        for a, p in pieces:
            if isinstance(p, CantorIndicator) and not a.contains_arc(p.spec.base):
                raise DomainError("a cantor piece must contain the base arc of its set")

    @classmethod
    def constant(cls, v) -> "BoundaryWeight":
        p = Const(v) if v > 0 else Zero()
        return cls(((FULL_CIRCLE, p),))

    @classmethod
    def zero(cls) -> "BoundaryWeight":
        return cls(((FULL_CIRCLE, Zero()),))

    @classmethod
    def single(cls, profile: Profile) -> "BoundaryWeight":
        return cls(((FULL_CIRCLE, profile),))

    @classmethod
    def cantor(cls, spec: FatCantorSpec | None = None, v=1.0, stage=20) -> "BoundaryWeight":
        return cls(((FULL_CIRCLE, CantorIndicator(spec or FatCantorSpec(), v, stage)),))

    def is_zero(self) -> bool:
        return all(isinstance(p, Zero) for _, p in self.pieces)

    def is_constant(self):
        """The constant value if ``w`` is constant on the circle, else ``None``."""
        if len(self.pieces) == 1:
            p = self.pieces[0][1]
            if isinstance(p, Zero):
                return 0.0
            if isinstance(p, Const):
                return float(p.v)
        return None

    def value(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.zeros(t.shape)
        for arc, p in self.pieces:
            sel = arc.contains(t)
            if np.any(sel):
                out[sel] = p.value(t[sel])
        return out

    def _segments(self, arc: Arc):
        """Yield ``(profile, lo, hi)`` plain intervals of ``arc`` per piece."""
        for parc, p in self.pieces:
            for sub in parc.intersect(arc):
                for lo, hi in sub.pieces():
                    yield p, lo, hi

    def integral(self, arc: Arc = FULL_CIRCLE):
        return mpmath.fsum(p.integral(lo, hi) for p, lo, hi in self._segments(arc))

    def total_mass(self) -> float:
        with mpmath.workprec(64):
            return float(self.integral())

    def log_integral(self, arc: Arc = FULL_CIRCLE):
        parts = [p.log_integral(lo, hi) for p, lo, hi in self._segments(arc)]
        if any(x == -mpmath.inf for x in parts):
            return -mpmath.inf
        return mpmath.fsum(parts)

    def log_divergent(self, arc: Arc) -> bool:
        return any(p.log_divergent(lo, hi) for p, lo, hi in self._segments(arc))

    def cantor_pieces(self):
        return [p for _, p in self.pieces if isinstance(p, CantorIndicator)]

    def sym_diff_bound(self) -> float:
        return float(sum((p.v * p.part.sym_diff_bound for p in self.cantor_pieces()), 0.0))

    def max_value(self, arc: Arc = FULL_CIRCLE) -> float:
        best = 0.0
        for p, lo, hi in self._segments(arc):
            if isinstance(p, (Const, CantorIndicator)):
                best = max(best, float(p.v))
            elif isinstance(p, Zero):
                continue
            else:
                ts = np.linspace(float(lo), float(hi), 4097)
                best = max(best, float(np.max(p.value(ts))))
        return best

    def describe(self) -> list:
        return [{"arc": [str(a.start), str(a.end)], **p.describe()} for a, p in self.pieces]


@dataclass(frozen=True)
class BoundaryValue:
    value: float
    resolved: bool


def eval_boundary(w: BoundaryWeight, t) -> BoundaryValue:
    """Value of ``w`` at angle ``t`` (turns) and whether it is stage-resolved."""
    t = float(t)
    for arc, p in w.pieces:
        if arc.contains(t):
            if isinstance(p, CantorIndicator):
                inside, resolved = p.membership([t])
                return BoundaryValue(float(p.v) if inside[0] else 0.0, bool(resolved[0]))
            return BoundaryValue(float(p.value([t])[0]), True)
    raise DomainError(f"angle {t} not covered by any piece")


@dataclass(frozen=True)
class Residual:
    E: CircleSet
    F: CircleSet
    table: list


_RULES = {
    "zero": "divergent on every arc",
    "const": "integrable on every arc",
    "power-cusp": "integrable on every arc",
    "chord-power": "integrable on every arc",
    "cantor-indicator": "divergent on every arc (limit set has empty interior)",
}


def carrier_and_residual(w: BoundaryWeight) -> Residual:
    """Carrier ``E = {w > 0}`` and residual set ``F`` from the profile rules.

    Both sets are symbolic representatives modulo null sets: isolated cusp
    points and piece endpoints are dropped.
    """
    e_arcs, e_cantor, f_arcs, f_cantor, table = [], [], [], [], []
    for arc, p in w.pieces:
        if not isinstance(p, (Zero, Const, PowerCusp, ExpCusp, ChordPower, CantorIndicator)):
            # custom profiles must carry their own rules
            p.log_divergent(float(arc.start), float(arc.end))
        e = p.positive_part(arc)
        f = p.residual_part(arc)
        e_arcs += e.arcs
        e_cantor += e.cantor_parts
        f_arcs += f.arcs
        f_cantor += f.cantor_parts
        if p.kind == "exp-cusp":
            rule = (
                f"divergent exactly on arcs whose closure contains t0={p.t0}"
                if p.exponent >= 1
                else "integrable on every arc"
            )
        else:
            rule = _RULES.get(p.kind, "custom rule")
        table.append(
            {
                "arc": (float(arc.start), float(arc.end)),
                "profile": p.kind,
                "log_integrability": rule,
                "carrier_measure": float(e.measure),
                "residual_measure": float(f.measure),
            }
        )
    return Residual(
        CircleSet(arcs=tuple(e_arcs), cantor_parts=tuple(e_cantor)),
        CircleSet(arcs=tuple(f_arcs), cantor_parts=tuple(f_cantor)),
        table,
    )
