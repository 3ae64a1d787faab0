"""The recurrence-generated polynomial sequence Q_n and its apparatus.

Coefficient tables are exact rationals (binary-float inputs are exact
dyadics, so Fraction arithmetic is lossless).  Numeric evaluation runs
the recurrence in the value domain instead, which stays stable for
degrees far beyond what the coefficient form tolerates.

Zeros are located by induction on n: interlacing guarantees exactly one
zero of Q_{n+1} strictly between consecutive points of
{alpha, zeros(Q_n), beta}, so bracketed bisection plus one Newton step
is provably convergent and needs no eigensolver.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InterlacingViolation
from .symbol import CriticalStructure, SymbolCoeffs, critical_structure


@dataclass(frozen=True)
class MultiIndex:
    n: int
    components: tuple[int, ...]


def multi_index(n: int, p: int) -> MultiIndex:
    """Staircase multi-index of |n| = n: k entries m+1 then p-k entries m."""
    if n < 0 or p < 1:
        raise ValueError("need n >= 0 and p >= 1")
    m, k = divmod(n, p)
    return MultiIndex(n=n, components=(m + 1,) * k + (m,) * (p - k))


@dataclass
class MonicPolySeq:
    """Exact coefficient table of Q_0..Q_N, low degree first."""

    sym: SymbolCoeffs
    N: int
    coeffs: list[list[Fraction]]

    def poly(self, n: int) -> list[Fraction]:
        if n < 0:
            return [Fraction(0)]
        return self.coeffs[n]

    def as_float(self, n: int) -> np.ndarray:
        return np.array([float(c) for c in self.poly(n)])


def gen_Q(sym: SymbolCoeffs, N: int) -> MonicPolySeq:
    """Q_{n+1} = (lam - a_0) Q_n - a_1 Q_{n-1} - ... - a_p Q_{n-p}."""
    if N < 0:
        raise ValueError("N must be >= 0")
    a = [Fraction(v) for v in sym.a]
    table: list[list[Fraction]] = [[Fraction(1)]]
    for n in range(N):
        qn = table[n]
        nxt = [Fraction(0)] * (n + 2)
        for i, c in enumerate(qn):
            nxt[i + 1] += c
            nxt[i] -= a[0] * c
        for k in range(1, sym.p + 1):
            if n - k < 0:
                break
            for i, c in enumerate(table[n - k]):
                nxt[i] -= a[k] * c
        table.append(nxt)
    return MonicPolySeq(sym=sym, N=N, coeffs=table)


@dataclass
class CompanionTable:
    """Companion polynomials p_n^(j) = Q_{n-1} + ... + Q_{n-j}."""

    seq: MonicPolySeq

    def poly(self, n: int, j: int) -> list[Fraction]:
        if not 1 <= j <= self.seq.sym.p:
            raise ValueError("need 1 <= j <= p")
        deg = max(n - 1, 0)
        out = [Fraction(0)] * (deg + 1)
        for i in range(1, j + 1):
            if n - i < 0:
                continue
            for m, c in enumerate(self.seq.poly(n - i)):
                out[m] += c
        return out


def gen_companion(sym: SymbolCoeffs, N: int) -> CompanionTable:
    return CompanionTable(seq=gen_Q(sym, N))


def moments(sym: SymbolCoeffs, j: int, m_max: int) -> list[Fraction]:
    """Exact moments L_j(lam^m), m = 0..m_max, via a finite band section.

    Information in (A^m v)_0 propagates down one index per multiply, so a
    section of size m_max + p + 1 reproduces the infinite operator
    exactly.
    """
    if not 1 <= j <= sym.p:
        raise ValueError("need 1 <= j <= p")
    size = m_max + sym.p + 2
    a = [Fraction(v) for v in sym.a]
    w = [Fraction(1) if i < j else Fraction(0) for i in range(size)]
    out = [w[0]]
    for _ in range(m_max):
        nxt = [Fraction(0)] * size
        for i in range(size):
            acc = w[i + 1] if i + 1 < size else Fraction(0)
            for k in range(0, sym.p + 1):
                if i - k >= 0:
                    acc += a[k] * w[i - k]
            nxt[i] = acc
        w = nxt
        out.append(w[0])
    return out


def eval_Q(sym: SymbolCoeffs, n: int, lam):
    """Q_n(lam) through the value-domain recurrence; scalar or array."""
    lam = np.asarray(lam)
    hist = [np.zeros_like(lam, dtype=complex) for _ in range(sym.p)]
    cur = np.ones_like(lam, dtype=complex)
    for _ in range(n):
        nxt = (lam - sym.a[0]) * cur
        for k in range(1, sym.p + 1):
            nxt = nxt - sym.a[k] * hist[k - 1]
        hist = [cur] + hist[:-1]
        cur = nxt
    if np.isrealobj(lam) and np.all(np.abs(cur.imag) == 0.0):
        cur = cur.real
    return cur[()] if np.ndim(lam) == 0 else cur


def eval_Q_with_derivative(sym: SymbolCoeffs, n: int, lam):
    """(Q_n, Q_n') jointly, for Newton polishing of zeros."""
    lam = np.asarray(lam, dtype=float)
    hist = [np.zeros_like(lam) for _ in range(sym.p)]
    dhist = [np.zeros_like(lam) for _ in range(sym.p)]
    cur = np.ones_like(lam)
    dcur = np.zeros_like(lam)
    for _ in range(n):
        nxt = (lam - sym.a[0]) * cur
        dnxt = cur + (lam - sym.a[0]) * dcur
        for k in range(1, sym.p + 1):
            nxt = nxt - sym.a[k] * hist[k - 1]
            dnxt = dnxt - sym.a[k] * dhist[k - 1]
        hist = [cur] + hist[:-1]
        dhist = [dcur] + dhist[:-1]
        cur, dcur = nxt, dnxt
    return cur, dcur


def zeros_Q(
    sym: SymbolCoeffs,
    n: int,
    struct: CriticalStructure | None = None,
) -> np.ndarray:
    """Sorted zeros of Q_n inside Gamma_1, by interlacing induction."""
    struct = struct or critical_structure(sym)
    g1 = struct.cut(1)
    alpha, beta = g1.lo, g1.hi
    zeros = np.empty(0)
    for m in range(1, n + 1):
        nodes = np.concatenate(([alpha], zeros, [beta]))
        vals, _ = eval_Q_with_derivative(sym, m, nodes)
        if np.any(vals[:-1] * vals[1:] >= 0.0):
            i = int(np.argwhere(vals[:-1] * vals[1:] >= 0.0)[0][0])
            raise InterlacingViolation(
                f"Q_{m} does not change sign on bracket "
                f"[{nodes[i]:.8g}, {nodes[i + 1]:.8g}]"
            )
        lo, hi = nodes[:-1].copy(), nodes[1:].copy()
        flo = vals[:-1].copy()
        for _ in range(48):
            mid = 0.5 * (lo + hi)
            fmid, _ = eval_Q_with_derivative(sym, m, mid)
            left = flo * fmid < 0.0
            exact = fmid == 0.0  # e.g. symmetric symbols hit 0 dead on
            hi = np.where(left | exact, mid, hi)
            lo = np.where(left, lo, mid)
            flo = np.where(left, flo, fmid)
        mid = 0.5 * (lo + hi)
        f, df = eval_Q_with_derivative(sym, m, mid)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(df != 0.0, f / df, 0.0)
        step = np.where(np.abs(step) <= 8.0 * (hi - lo), step, 0.0)
        zeros = np.sort(mid - step)
    return zeros


@dataclass
class HessenbergSection:
    """Finite section A_n: superdiagonal 1, diagonal a_0, subdiagonals a_k."""

    sym: SymbolCoeffs
    n: int

    def dense(self) -> np.ndarray:
        A = np.zeros((self.n, self.n))
        for i in range(self.n):
            if i + 1 < self.n:
                A[i, i + 1] = 1.0
            for k in range(0, self.sym.p + 1):
                if i - k >= 0:
                    A[i, i - k] = self.sym.a[k]
        return A

    def char_det(self, lam: float) -> float:
        """det(lam I - A_n) via LU; independent check of eval_Q."""
        sign, logabs = np.linalg.slogdet(lam * np.eye(self.n) - self.dense())
        return float(sign * np.exp(logabs))
