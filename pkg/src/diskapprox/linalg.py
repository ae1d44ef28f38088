"""Preconditioned multiprecision Cholesky for Hermitian Gram matrices.

Matrices are numpy object arrays of gmpy2 ``mpc`` values.  The matrix is
scaled by its diagonal before factorisation; a failed or ill-conditioned
factorisation is retried at higher precision along a fixed ladder.
"""

from __future__ import annotations

from dataclasses import dataclass

import gmpy2
import mpmath
import numpy as np
from gmpy2 import mpc, mpfr

from .errors import EscalationExhausted, PrecisionUnreachable
from .quadrature import from_mpf

__all__ = ["LADDER", "to_mpc", "Factorization", "cholesky_mp", "factor_with_escalation"]

LADDER = (128, 256, 512)


def to_mpc(z, prec: int):
    """mpmath (or Python) complex to a gmpy2 ``mpc`` at ``prec`` bits."""
    if not isinstance(z, mpmath.mpc):
        with mpmath.workprec(prec):
            z = mpmath.mpc(z)
    with gmpy2.context(gmpy2.get_context(), precision=prec):
        return mpc(from_mpf(z.real, prec), from_mpf(z.imag, prec))


@dataclass
class Factorization:
    """``D^{-1/2} A D^{-1/2} = L L^*`` with the diagonal scaling kept alongside."""

    L: np.ndarray
    scale: np.ndarray
    precision: int
    pivots: np.ndarray

    @property
    def n(self) -> int:
        return self.L.shape[0]

    def cond_estimates(self) -> np.ndarray:
        """Pivot-ratio condition estimate of every leading block."""
        p = self.pivots.astype(float) ** 2
        return np.maximum.accumulate(p) / np.minimum.accumulate(p)

    def forward(self, b) -> np.ndarray:
        """``y = L^{-1} D^{-1/2} b`` (object array of mpc)."""
        n = self.n
        with gmpy2.context(gmpy2.get_context(), precision=self.precision):
            rhs = np.array([b[i] * self.scale[i] for i in range(n)], dtype=object)
            y = np.empty(n, dtype=object)
            for i in range(n):
                acc = rhs[i] - (self.L[i, :i].dot(y[:i]) if i else 0)
                y[i] = acc / self.L[i, i]
        return y

    def quadratic_form_partials(self, b) -> list:
        """``b_N^* A_N^{-1} b_N`` for every leading size ``N + 1``, as mpfr values."""
        y = self.forward(b)
        with gmpy2.context(gmpy2.get_context(), precision=self.precision):
            out, acc = [], mpfr(0)
            for v in y:
                acc += gmpy2.norm(v)
                out.append(acc)
        return out


def cholesky_mp(A: np.ndarray, prec: int) -> Factorization:
    """Diagonally preconditioned Cholesky of a Hermitian object matrix.

    Raises :class:`PrecisionUnreachable` on a non-positive pivot.
    """
    n = A.shape[0]
    with gmpy2.context(gmpy2.get_context(), precision=prec):
        diag = [A[i, i].real for i in range(n)]
        if any(d <= 0 for d in diag):
            raise PrecisionUnreachable("non-positive diagonal entry")
        scale = np.array([1 / gmpy2.sqrt(d) for d in diag], dtype=object)
        B = np.empty((n, n), dtype=object)
        for i in range(n):
            B[i] = A[i] * scale[i] * scale
        offdiag = any(B[i, j] != 0 for i in range(n) for j in range(i))
        L = np.empty((n, n), dtype=object)
        L[:] = mpc(0)
        pivots = np.empty(n, dtype=object)
        if not offdiag:
            for j in range(n):
                pivots[j] = gmpy2.sqrt(B[j, j].real)
                L[j, j] = mpc(pivots[j])
            return Factorization(L, scale, prec, pivots)
        Lc = L.copy()
        for j in range(n):
            v = B[j:, j] - L[j:, :j].dot(Lc[j, :j]) if j else B[j:, j].copy()
            d = v[0].real
            if not d > 0:
                raise PrecisionUnreachable(f"non-positive pivot at index {j}")
            d = gmpy2.sqrt(d)
            pivots[j] = d
            L[j:, j] = v / d
            L[j, j] = mpc(d)
            Lc[j:, j] = np.array([x.conjugate() for x in L[j:, j]], dtype=object)
    return Factorization(L, scale, prec, pivots)


def factor_with_escalation(build, start: int = 128, margin_bits: int = 40):
    """Factor ``build(prec)`` climbing the precision ladder from ``start``.

    A rung is accepted when the factorisation succeeds and its condition
    estimate leaves ``margin_bits`` of headroom.  Returns the factorisation,
    the matrix data returned by ``build`` and the list of rungs tried.
    """
    tried = []
    for prec in [p for p in LADDER if p >= start] or [start]:
        tried.append(prec)
        data = build(prec)
        try:
            fac = cholesky_mp(data["matrix"], prec)
        except PrecisionUnreachable:
            continue
        cond = float(fac.cond_estimates()[-1])
        if cond < 2.0 ** (prec - margin_bits):
            return fac, data, tried
    raise EscalationExhausted(f"Gram factorisation failed at every precision in {tried}")
