"""Closed forms for the cubic symbol a(z) = 1/z + a1 z + a2 z^2.

Everything here is driven by two prescribed negative critical points
x1 < x2 < 0.  The third critical point is -x1-x2 > 0 and the coefficient
choice

    a1 = x1^2 + x2^2 + x1 x2,   a2 = -x1 x2 (x1 + x2) / 2

makes q(z) = z^3 - a1 z - 2 a2 vanish exactly at those three points.
The small branch z0 then has a Cardano expression, and both generator
densities reduce to real cube-root formulas.  These closed forms act as
an independent oracle for the generic branch/density pipeline.

Sign conventions note: the source display for the density on Gamma_1
carries a -sqrt(3)/pi prefactor and the one on Gamma_2 divides by
(x - lam2); evaluated literally both come out negative.  The versions
here use +sqrt(3)/(2 pi) and (lam2 - x), validated against the generic
solver (positive densities, correct masses).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import BadOrdering, BranchPointHit, NotInCut
from .symbol import SymbolCoeffs, build_symbol


@dataclass(frozen=True)
class CubicParams:
    x1: float
    x2: float

    @property
    def a1(self) -> float:
        return self.x1**2 + self.x2**2 + self.x1 * self.x2

    @property
    def a2(self) -> float:
        return -0.5 * self.x1 * self.x2 * (self.x1 + self.x2)


def cubic_build(params: CubicParams) -> tuple[SymbolCoeffs, tuple[float, float, float]]:
    """Symbol coefficients and branch points (lam1, lam2, lam3).

    lam1 = r(x1) and lam3 = r(-x1-x2) frame the interval cut; lam2 =
    r(x2) is the finite end of the ray cut (-inf, lam2].
    """
    x1, x2 = params.x1, params.x2
    if not x1 < x2 < 0:
        raise BadOrdering(f"need x1 < x2 < 0, got ({x1}, {x2})")
    sym = build_symbol(2, [0.0, params.a1, params.a2])
    lam1 = (4 * x1**2 + x2**2 + x1 * x2) / (2 * x1)
    lam2 = (4 * x2**2 + x1**2 + x1 * x2) / (2 * x2)
    lam3 = -(4 * x1**2 + 4 * x2**2 + 7 * x1 * x2) / (2 * (x1 + x2))
    return sym, (lam1, lam2, lam3)


def _k1(params: CubicParams, lam):
    return 36 * params.a1 * params.a2 * lam + 8 * params.a1**3 + 108 * params.a2**2


def _k2(params: CubicParams, lam):
    _, (l1, l2, l3) = cubic_build(params)
    return -4 * params.a2 * (lam - l1) * (lam - l2) * (lam - l3)


def _l(params: CubicParams, lam):
    return 4 * (3 * params.a2 * lam + params.a1**2)


def cubic_z0(params: CubicParams, lam: complex) -> complex:
    """The root of a2 z^3 + a1 z^2 - lam z + 1 vanishing at infinity, by Cardano.

    u^3 = -k1 + 12 sqrt(3) a2 sqrt(k2) and z = (u + l/u)/(6 a2) - a1/(3 a2)
    enumerate the three roots over the cube roots of unity; the one of
    smallest modulus is z0 (ties broken as in the generic branch order).
    Principal square and cube roots throughout.
    """
    a1, a2 = params.a1, params.a2
    lam = complex(lam)
    _, lams = cubic_build(params)
    if min(abs(lam - b) for b in lams) < 1e-13 * max(abs(b) for b in lams):
        raise BranchPointHit(f"lambda {lam} is a branch point")
    u3 = -_k1(params, lam) + 12 * math.sqrt(3.0) * a2 * cmath.sqrt(_k2(params, lam))
    u = u3 ** (1.0 / 3.0)
    if u == 0:
        raise BranchPointHit("degenerate Cardano radical")
    ell = _l(params, lam)
    omega = cmath.exp(2j * cmath.pi / 3.0)
    roots = []
    for m in range(3):
        um = u * omega**m
        roots.append((um + ell / um) / (6 * a2) - a1 / (3 * a2))
    roots.sort(key=lambda z: (abs(z), z.real, z.imag))
    return roots[0]


def _cbrt(v):
    return np.cbrt(v) if np.ndim(v) else math.copysign(abs(v) ** (1.0 / 3.0), v)


def cubic_rho1_density(params: CubicParams, x):
    """Density of rho_1 on the interval cut, in cube-root form.

    With K = k1/(6 a2)^3 and S = sqrt(k2/(108 a2^4)) >= 0,
    rho_1'(x) = sqrt(3)/(2 pi) * (cbrt(K + S) - cbrt(K - S)).
    """
    a2 = params.a2
    _, (l1, _, l3) = cubic_build(params)
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= l1) or np.any(xa >= l3):
        raise NotInCut("x outside the interior of the interval cut")
    big_k = _k1(params, xa) / (6 * a2) ** 3
    s = np.sqrt(np.maximum(_k2(params, xa), 0.0) / (108 * a2**4))
    val = math.sqrt(3.0) / (2 * np.pi) * (_cbrt(big_k + s) - _cbrt(big_k - s))
    return val if np.ndim(x) else float(val)


def cubic_rho2_density(params: CubicParams, x):
    """Density of rho_2 on the ray cut (-inf, lam2], in cube-root form.

    rho_2'(x) = sqrt(3)/(2 pi (lam2 - x)) * (cbrt(S - K) + cbrt(K + S)).
    """
    a2 = params.a2
    _, (_, l2, _) = cubic_build(params)
    xa = np.asarray(x, dtype=float)
    if np.any(xa >= l2):
        raise NotInCut("x outside the interior of the ray cut")
    big_k = _k1(params, xa) / (6 * a2) ** 3
    s = np.sqrt(np.maximum(_k2(params, xa), 0.0) / (108 * a2**4))
    val = (
        math.sqrt(3.0)
        / (2 * np.pi * (l2 - xa))
        * (_cbrt(s - big_k) + _cbrt(big_k + s))
    )
    return val if np.ndim(x) else float(val)
