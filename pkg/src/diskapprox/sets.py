"""Arcs, fat Cantor sets and finite unions of them on the circle.

Angles are measured in full turns, so the circle is ``[0, 1)`` with total
measure one.  Arc endpoints are kept as :class:`fractions.Fraction` so that
containment and disjointness checks are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath
import numpy as np

from .errors import DomainError

__all__ = [
    "Arc",
    "FULL_CIRCLE",
    "FatCantorSpec",
    "CantorPart",
    "CircleSet",
    "CantorStage",
    "CarlesonSums",
    "as_fraction",
    "circular_distance",
    "fat_cantor_stage",
    "carleson_sums",
    "arcs_disjoint",
]


def as_fraction(x) -> Fraction:
    """Exact rational from an int, Fraction, decimal string or float.

    Floats go through ``repr`` so that ``0.1`` becomes ``1/10`` rather than
    its binary expansion.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise DomainError(f"not a number: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise DomainError(f"non-finite angle {x!r}")
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def circular_distance(t, t0):
    """Distance in turns between angles on the circle, in ``[0, 1/2]``."""
    d = np.mod(np.asarray(t, dtype=float) - float(t0), 1.0)
    return np.minimum(d, 1.0 - d)


@dataclass(frozen=True, order=True)
class Arc:
    """Half-open arc ``[start, end)`` in turns with ``0 <= start < 1``.

    ``end`` may exceed 1 when the arc wraps through angle 0; the full
    circle is ``Arc(0, 1)``.
    """

    start: Fraction
    end: Fraction

    def __init__(self, start, end):
        a = as_fraction(start)
        b = as_fraction(end)
        length = b - a
        if length <= 0 or length > 1:
            raise DomainError(f"arc length must lie in (0, 1], got [{a}, {b})")
        shift = Fraction(math.floor(a))
        object.__setattr__(self, "start", a - shift)
        object.__setattr__(self, "end", b - shift)

    @property
    def length(self) -> Fraction:
        return self.end - self.start

    @property
    def midpoint(self) -> Fraction:
        return (self.start + self.end) / 2 % 1

    def is_full(self) -> bool:
        return self.length == 1

    def pieces(self) -> list[tuple[Fraction, Fraction]]:
        """Split into one or two plain intervals inside ``[0, 1]``."""
        if self.end <= 1:
            return [(self.start, self.end)]
        return [(self.start, Fraction(1)), (Fraction(0), self.end - 1)]

    def contains(self, t) -> np.ndarray | bool:
        """Membership of angles ``t`` (turns, any real) in the half-open arc."""
        rel = np.mod(np.asarray(t, dtype=float) - float(self.start), 1.0)
        out = rel < float(self.length)
        if self.is_full():
            out = np.ones_like(rel, dtype=bool)
        return out if out.ndim else bool(out)

    def contains_exact(self, t: Fraction) -> bool:
        rel = (as_fraction(t) - self.start) % 1
        return self.is_full() or rel < self.length

    def contains_arc(self, other: "Arc") -> bool:
        if self.is_full():
            return True
        rel = (other.start - self.start) % 1
        return rel + other.length <= self.length

    def intersect(self, other: "Arc") -> list["Arc"]:
        """Intersection as a list of arcs (at most two on the circle)."""
        out = []
        for a0, a1 in self.pieces():
            for b0, b1 in other.pieces():
                lo, hi = max(a0, b0), min(a1, b1)
                if hi > lo:
                    out.append((lo, hi))
        return _merge_intervals(out)

    def complement(self) -> list["Arc"]:
        if self.is_full():
            return []
        return [Arc(self.end, self.start + 1)]

    def __repr__(self):
        return f"Arc({self.start}, {self.end})"


FULL_CIRCLE = Arc(0, 1)


def _merge_intervals(intervals: Iterable[tuple[Fraction, Fraction]]) -> list[Arc]:
    """Merge plain ``[lo, hi)`` intervals in [0, 1] into arcs, gluing across 0."""
    ivs = sorted((lo, hi) for lo, hi in intervals if hi > lo)
    merged: list[list[Fraction]] = []
    for lo, hi in ivs:
        if merged and lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    if len(merged) >= 2 and merged[0][0] == 0 and merged[-1][1] == 1:
        first = merged.pop(0)
        merged[-1][1] = 1 + first[1]
    if len(merged) == 1 and merged[0][0] == 0 and merged[0][1] == 1:
        return [FULL_CIRCLE]
    return [Arc(lo, hi) for lo, hi in merged]


def arcs_disjoint(arcs: Sequence[Arc]) -> bool:
    ivs = sorted(p for a in arcs for p in a.pieces())
    return all(ivs[i][1] <= ivs[i + 1][0] for i in range(len(ivs) - 1))


@dataclass(frozen=True)
class FatCantorSpec:
    """Symmetric Cantor-type set built by removing centred gaps.

    At stage ``k`` every surviving arc loses an open middle gap occupying
    the fraction ``r_k`` of its length.  Two exact schedules are provided:

    ``telescoping``  relative measure after stage k is
                     ``rho + (1 - rho) / 2**k``; the limit has measure
                     ``rho * |base|`` and ``r_1 = (1 - rho) / 2``.
    ``constant``     ``r_k = r`` for all k; the limit is null (``r = 1/3``
                     on [0, 1] is the middle-thirds set).
    """

    base: Arc = FULL_CIRCLE
    schedule: str = "telescoping"
    parameter: Fraction = Fraction(1, 2)

    def __post_init__(self):
        p = as_fraction(self.parameter)
        object.__setattr__(self, "parameter", p)
        if self.schedule not in ("telescoping", "constant"):
            raise DomainError(f"unknown gap schedule {self.schedule!r}")
        if not 0 < p < 1:
            raise DomainError("schedule parameter must lie in (0, 1)")

    def relative_measure(self, k: int) -> Fraction:
        if k < 0:
            raise DomainError("stage must be >= 0")
        p = self.parameter
        if self.schedule == "telescoping":
            return p + (1 - p) / 2**k
        return (1 - p) ** k

    def gap_ratio(self, k: int) -> Fraction:
        if k < 1:
            raise DomainError("gap ratios are indexed from stage 1")
        return 1 - self.relative_measure(k) / self.relative_measure(k - 1)

    def arc_length(self, k: int) -> Fraction:
        """Length of each of the 2**k stage-k arcs."""
        return self.base.length * self.relative_measure(k) / 2**k

    def stage_measure(self, k: int) -> Fraction:
        return self.base.length * self.relative_measure(k)

    @property
    def target_measure(self) -> Fraction:
        if self.schedule == "telescoping":
            return self.base.length * self.parameter
        return Fraction(0)

    def node_limit_measure(self, k: int) -> Fraction:
        """Measure of the limit set inside one stage-k arc."""
        return self.target_measure / 2**k

    def child_offset(self, j: int) -> Fraction:
        """Shift from a stage-(j-1) arc centre to its children's centres."""
        return (self.arc_length(j - 1) - self.arc_length(j)) / 2

    def stage_starts(self, k: int) -> list[Fraction]:
        starts = [self.base.start]
        for j in range(1, k + 1):
            shift = self.arc_length(j - 1) - self.arc_length(j)
            starts = [s for a in starts for s in (a, a + shift)]
        return starts

    def stage_starts_float(self, k: int) -> np.ndarray:
        starts = np.array([float(self.base.start)])
        for j in range(1, k + 1):
            shift = float(self.arc_length(j - 1) - self.arc_length(j))
            starts = np.stack([starts, starts + shift], axis=1).ravel()
        return starts

    def stage_arcs(self, k: int) -> list[Arc]:
        length = self.arc_length(k)
        return [Arc(s, s + length) for s in self.stage_starts(k)]

    def locate(self, t, stage: int):
        """Vectorised membership of angles ``t`` in the stage-``stage`` set.

        Returns ``(inside, gap_stage)`` where ``gap_stage`` is the stage at
        which a point fell into a removed gap (0 for points off the base
        arc, -1 for points that survive every stage).
        """
        t = np.atleast_1d(np.asarray(t, dtype=float))
        rel = np.mod(t - float(self.base.start), 1.0)
        inside = rel < float(self.base.length)
        if self.base.is_full():
            inside[:] = True
        gap_stage = np.where(inside, -1, 0)
        pos = rel.copy()
        for j in range(1, stage + 1):
            parent = float(self.arc_length(j - 1))
            child = float(self.arc_length(j))
            alive = gap_stage == -1
            left = pos < child
            right = pos >= parent - child
            pos = np.where(alive & right & ~left, pos - (parent - child), pos)
            gap_stage = np.where(alive & ~left & ~right, j, gap_stage)
        return gap_stage == -1, gap_stage


@dataclass(frozen=True)
class CantorPart:
    """A fat Cantor limit set together with the stage used to realise it."""

    spec: FatCantorSpec
    stage: int = 20

    @property
    def measure(self) -> Fraction:
        return self.spec.target_measure

    @property
    def sym_diff_bound(self) -> Fraction:
        return self.spec.stage_measure(self.stage) - self.spec.target_measure


@dataclass(frozen=True)
class CircleSet:
    """Finite union of disjoint arcs plus fat Cantor limit sets."""

    arcs: tuple[Arc, ...] = ()
    cantor_parts: tuple[CantorPart, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "arcs", tuple(self.arcs))
        object.__setattr__(self, "cantor_parts", tuple(self.cantor_parts))
        if not arcs_disjoint(self.arcs):
            raise DomainError("arcs of a CircleSet must be pairwise disjoint")
        if self.measure > 1:
            raise DomainError("total measure exceeds that of the circle")

    @classmethod
    def full(cls) -> "CircleSet":
        return cls(arcs=(FULL_CIRCLE,))

    @classmethod
    def empty(cls) -> "CircleSet":
        return cls()

    @property
    def measure(self) -> Fraction:
        return sum((a.length for a in self.arcs), Fraction(0)) + sum(
            (c.measure for c in self.cantor_parts), Fraction(0)
        )

    @property
    def measure_error(self) -> Fraction:
        """Bound on |S - S_stage| summed over Cantor parts."""
        return sum((c.sym_diff_bound for c in self.cantor_parts), Fraction(0))

    def is_empty(self) -> bool:
        return not self.arcs and all(c.measure == 0 for c in self.cantor_parts)

    def is_full(self) -> bool:
        return sum((a.length for a in self.arcs), Fraction(0)) == 1

    def contains(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.zeros(t.shape, dtype=bool)
        for a in self.arcs:
            out |= a.contains(t)
        for c in self.cantor_parts:
            out |= c.spec.locate(t, c.stage)[0]
        return out

    def stage_rows(self, display_stage: int | None = None) -> list[tuple[float, float, int]]:
        """Rows ``(start_turns, end_turns, stage)`` for CSV export."""
        rows = [(float(a.start), float(a.end), 0) for a in self.arcs]
        for c in self.cantor_parts:
            k = c.stage if display_stage is None else min(display_stage, c.stage)
            length = float(c.spec.arc_length(k))
            rows.extend((s, s + length, k) for s in c.spec.stage_starts_float(k))
        return rows


@dataclass(frozen=True)
class CantorStage:
    arcs: CircleSet
    measure: Fraction
    sym_diff_bound: Fraction


def fat_cantor_stage(spec: FatCantorSpec, k: int) -> CantorStage:
    """The 2**k surviving arcs after stage ``k`` with exact measure data."""
    if k < 0:
        raise DomainError("stage must be >= 0")
    arcs = spec.stage_arcs(k)
    measure = spec.stage_measure(k)
    return CantorStage(CircleSet(arcs=tuple(arcs)), measure, measure - spec.target_measure)


@dataclass(frozen=True)
class CarlesonSums:
    sum_alpha: float
    sum_bc: float
    tail_alpha: float = 0.0
    tail_bc: float = 0.0


def _series_with_tail(log_terms, counts_log, tail_window=20):
    """Sum ``exp(log_terms)`` and bound the tail by a ratio test."""
    logs = [lt + cl for lt, cl in zip(log_terms, counts_log)]
    total = mpmath.fsum(mpmath.exp(x) for x in logs)
    ratios = [logs[i + 1] - logs[i] for i in range(len(logs) - tail_window, len(logs) - 1)]
    qmax = max(ratios)
    if min(ratios) >= 0:
        return math.inf, math.inf
    if qmax >= 0:
        # ratios straddle 1 at the end of the computed range: undecided, so be conservative
        return math.inf, math.inf
    q = mpmath.exp(qmax)
    tail = mpmath.exp(logs[-1]) * q / (1 - q)
    return float(total + tail), float(tail)


def carleson_sums(family, alpha: float, max_stage: int = 400) -> CarlesonSums:
    """``sum |l|**alpha`` and ``sum |l| log(1/|l|)`` over complementary arcs.

    ``family`` is either a sequence of disjoint arcs (or bare lengths) or a
    :class:`FatCantorSpec`, in which case the complementary gaps are
    generated from the schedule and the series tail is bounded by a ratio
    test on the last computed terms.
    """
    if not 0 < alpha <= 1:
        raise DomainError("alpha must lie in (0, 1]")
    if not isinstance(family, FatCantorSpec):
        lengths = [float(a.length) if isinstance(a, Arc) else float(a) for a in family]
        if isinstance(family, Sequence) and family and isinstance(family[0], Arc):
            if not arcs_disjoint(list(family)):
                raise DomainError("arcs must be disjoint")
        s_alpha = math.fsum(l**alpha for l in lengths)
        s_bc = math.fsum(l * math.log(1 / l) for l in lengths if l < 1)
        return CarlesonSums(s_alpha, s_bc)

    spec = family
    with mpmath.workprec(80):
        log_alpha, log_bc, counts = [], [], []
        for k in range(1, max_stage + 1):
            gap = mpmath.mpf(spec.gap_ratio(k).numerator) / spec.gap_ratio(k).denominator
            gap *= mpmath.mpf(spec.arc_length(k - 1).numerator) / spec.arc_length(k - 1).denominator
            lg = mpmath.log(gap)
            counts.append((k - 1) * mpmath.log(2))
            log_alpha.append(alpha * lg)
            log_bc.append(lg + mpmath.log(-lg))
        s_alpha, t_alpha = _series_with_tail(log_alpha, counts)
        s_bc, t_bc = _series_with_tail(log_bc, counts)
    outside = float(1 - spec.base.length)
    if outside > 0:
        s_alpha += outside**alpha
        s_bc += outside * math.log(1 / outside) if outside < 1 else 0.0
    return CarlesonSums(s_alpha, s_bc, t_alpha, t_bc)
