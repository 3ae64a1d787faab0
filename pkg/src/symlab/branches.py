"""Branch solver for a(z) = lambda and the objects built from branches.

The p+1 solutions ordered by modulus are the backbone of the whole
construction: boundary values on the cuts give the measure densities,
log-derivatives give the s_k system, and the vector continued fraction
reproduces (z_0, z_0^2, ..., z_0^p) at large lambda.

Boundary values on a cut are taken from below through a geometric
epsilon schedule with Richardson extrapolation.  Density evaluation on
quadrature grids takes a cheaper route: at real x inside cut k the root
set is real except for the single conjugate pair (k-1, k), so one cached
sign (which pair member is the minus-side limit) resolves the boundary
value from a direct real-coefficient solve.  The two routes are tested
against each other.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import quadrature
from .errors import (
    AtBranchPoint,
    ConvergenceFailure,
    DivisionBlowup,
    NotInCut,
    OnCut,
    UnstableOrdering,
)
from .quadrature import MeasureHandle, cauchy_transform
from .rootfind import roots_batched
from .symbol import CriticalStructure, Cut, SymbolCoeffs, critical_structure

_TIE_TOL = 1e-9


@dataclass(frozen=True)
class BranchValues:
    lam: complex
    z: tuple[complex, ...]
    tie_flags: tuple[bool, ...]


@dataclass(frozen=True)
class CutSample:
    k: int
    x: float
    z_minus: complex
    z_plus: complex
    all_branches_minus: tuple[complex, ...]


def _branch_coeffs(sym: SymbolCoeffs, lams: np.ndarray) -> np.ndarray:
    """Rows of a_p z^{p+1} + ... + a_1 z^2 + (a_0-lam) z + 1, low to high."""
    lams = np.asarray(lams, dtype=complex).ravel()
    m = lams.size
    out = np.empty((m, sym.p + 2), dtype=complex)
    out[:, 0] = 1.0
    out[:, 1] = sym.a[0] - lams
    for k in range(1, sym.p + 1):
        out[:, k + 1] = sym.a[k]
    return out


def solve_grid(sym: SymbolCoeffs, lams) -> np.ndarray:
    """Modulus-sorted branches for an array of lambda, shape (m, p+1)."""
    lams = np.asarray(lams, dtype=complex).ravel()
    roots = roots_batched(_branch_coeffs(sym, lams))
    # lexicographic (modulus, real, imag) for a deterministic order
    order = np.lexsort((roots.imag, roots.real, np.abs(roots)), axis=1)
    roots = np.take_along_axis(roots, order, axis=1)
    res = np.abs(_eval_a(sym, roots) - lams[:, None])
    bad = res > 1e-10 * (1.0 + np.abs(lams))[:, None]
    if bad.any():
        i = int(np.argwhere(bad)[0][0])
        raise ConvergenceFailure(
            f"branch residual {res[bad].max():.3e} at lambda = {lams[i]:.6g}"
        )
    return roots


def _eval_a(sym: SymbolCoeffs, z: np.ndarray) -> np.ndarray:
    acc = np.zeros_like(z)
    for c in reversed(sym.a):
        acc = acc * z + c
    return acc + 1.0 / z


def _eval_da(sym: SymbolCoeffs, z: np.ndarray) -> np.ndarray:
    acc = np.zeros_like(z)
    for k in range(sym.p, 0, -1):
        acc = acc * z + k * sym.a[k]
    return acc - 1.0 / z ** 2


def solve_branches(sym: SymbolCoeffs, lam: complex) -> BranchValues:
    z = solve_grid(sym, [lam])[0]
    mods = np.abs(z)
    ties = tuple(
        bool(mods[i + 1] - mods[i] <= _TIE_TOL * max(mods[i + 1], 1e-30))
        for i in range(sym.p)
    )
    return BranchValues(lam=complex(lam), z=tuple(z), tie_flags=ties)


def branch_derivative(sym: SymbolCoeffs, bv: BranchValues) -> tuple[complex, ...]:
    """z_j'(lambda) = 1/a'(z_j) by implicit differentiation."""
    out = []
    for z in bv.z:
        da = complex(_eval_da(sym, np.asarray(z)))
        scale = abs(z) ** -2 + sum(
            k * abs(sym.a[k]) * abs(z) ** (k - 1) for k in range(1, sym.p + 1)
        )
        if abs(da) < 1e-8 * scale:
            raise AtBranchPoint(f"a'({z:.6g}) = {da:.3e} too small")
        out.append(1.0 / da)
    return tuple(out)


def _richardson(values: np.ndarray) -> np.ndarray:
    """Neville table limit for samples at eps, eps/2, eps/4, ... -> 0."""
    t = [np.asarray(values[0])]
    rows = [list(t)]
    for m in range(1, len(values)):
        row = [np.asarray(values[m])]
        for i in range(1, m + 1):
            fac = 2.0 ** i
            row.append((fac * row[i - 1] - rows[m - 1][i - 1]) / (fac - 1.0))
        rows.append(row)
    return rows[-1][-1]


def boundary_values(
    sym: SymbolCoeffs,
    k: int,
    x: float,
    struct: CriticalStructure | None = None,
) -> CutSample:
    """Boundary values z_{k-1,+-}(x) for x strictly inside cut k."""
    struct = struct or critical_structure(sym)
    cut = struct.cut(k)
    if not cut.contains_interior(float(x)):
        raise NotInCut(f"x = {x:.8g} is not interior to cut {k}")
    scale = max(1.0, abs(x))
    eps = 1e-3 * scale * 0.5 ** np.arange(11)
    roots = solve_grid(sym, x - 1j * eps)  # shape (11, p+1)
    for m in range(len(eps) - 1):
        d_same = np.abs(roots[m + 1] - roots[m])
        d_cross = np.abs(roots[m + 1][None, :] - roots[m][:, None])
        np.fill_diagonal(d_cross, np.inf)
        if np.any(d_same >= d_cross.min(axis=1)):
            raise UnstableOrdering(
                f"branch labels flipped between eps={eps[m]:.3e} and {eps[m + 1]:.3e}"
            )
    limits = _richardson(roots)
    zm = complex(limits[k - 1])
    return CutSample(
        k=k, x=float(x), z_minus=zm, z_plus=zm.conjugate(),
        all_branches_minus=tuple(limits),
    )


# ---- cached-sign direct densities on cuts ----

_sign_cache: dict[tuple, float] = {}


def _reference_point(cut: Cut) -> float:
    if not cut.is_ray:
        return 0.5 * (cut.lo + cut.hi)
    e = cut.finite_end
    off = max(1.0, abs(e))
    return e + off if math.isinf(cut.hi) else e - off


def _minus_sign(sym: SymbolCoeffs, k: int, struct: CriticalStructure) -> float:
    key = (sym.key(), k)
    if key not in _sign_cache:
        x_ref = _reference_point(struct.cut(k))
        s = boundary_values(sym, k, x_ref, struct)
        _sign_cache[key] = math.copysign(1.0, s.z_minus.imag)
    return _sign_cache[key]


def pair_minus(
    sym: SymbolCoeffs,
    k: int,
    xs: np.ndarray,
    struct: CriticalStructure,
) -> np.ndarray:
    """z_{k-1,-}(x) on a grid inside cut k via the conjugate-pair shortcut.

    At real x interior to cut k all branches are real except the tied
    pair (k-1, k); the cached minus-side imaginary sign picks the member.
    """
    xs = np.asarray(xs, dtype=float).ravel()
    sign = _minus_sign(sym, k, struct)
    roots = solve_grid(sym, xs)
    za, zb = roots[:, k - 1], roots[:, k]
    ok = np.abs(za - np.conj(zb)) <= 1e-6 * (np.abs(za) + 1.0)
    zm = np.where(za.imag * sign > 0, za, zb)
    bad = ~ok | (np.abs(zm.imag) == 0.0)
    if bad.any():
        for i in np.flatnonzero(bad):
            zm[i] = boundary_values(sym, k, float(xs[i]), struct).z_minus
    return zm


def s_density(sym: SymbolCoeffs, k: int, x, struct: CriticalStructure | None = None):
    """Density of s_k at x inside cut k: (1/pi) Im(z_{k-1,+}'/z_{k-1,+}).

    Branches 0..k-2 are real there and drop out of the imaginary part,
    so only the tied pair contributes.
    """
    struct = struct or critical_structure(sym)
    cut = struct.cut(k)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if not all(cut.contains_interior(float(v)) for v in xs):
        raise NotInCut(f"point outside interior of cut {k}")
    zp = np.conj(pair_minus(sym, k, xs, struct))
    out = (1.0 / _eval_da(sym, zp) / zp).imag / np.pi
    return float(out[0]) if np.ndim(x) == 0 else out


def rho_density(sym: SymbolCoeffs, j: int, x, struct: CriticalStructure | None = None):
    """Density of the generator rho_j at x inside cut j."""
    struct = struct or critical_structure(sym)
    cut = struct.cut(j)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if not all(cut.contains_interior(float(v)) for v in xs):
        raise NotInCut(f"point outside interior of cut {j}")
    zm = pair_minus(sym, j, xs, struct)
    if j == 1:
        out = zm.imag / np.pi
    else:
        out = zm.imag / (np.pi * (xs - struct.lam[j - 1]))
    return float(out[0]) if np.ndim(x) == 0 else out


def s_measure(sym: SymbolCoeffs, k: int, struct: CriticalStructure | None = None) -> MeasureHandle:
    """MeasureHandle for s_k; mass (p-k+1)/p, endpoint exponents -1/2."""
    struct = struct or critical_structure(sym)
    cut = struct.cut(k)
    tail = None if not cut.is_ray else -1.0 - 1.0 / sym.p

    def dens(xs):
        return s_density(sym, k, np.asarray(xs, dtype=float), struct)

    return MeasureHandle(
        cut=cut, density=dens, endpoint_exponents=(-0.5, -0.5),
        tail_exponent=tail, finite_mass=True, name=f"s_{k}",
    )


def rho_measure(sym: SymbolCoeffs, j: int, struct: CriticalStructure | None = None) -> MeasureHandle:
    """MeasureHandle for rho_j; infinite mass with tail 1/p - 1 for j >= 2."""
    struct = struct or critical_structure(sym)
    cut = struct.cut(j)

    def dens(xs):
        return rho_density(sym, j, np.asarray(xs, dtype=float), struct)

    if j == 1:
        return MeasureHandle(
            cut=cut, density=dens, endpoint_exponents=(-0.5, -0.5),
            tail_exponent=None, finite_mass=True, name="rho_1",
        )
    return MeasureHandle(
        cut=cut, density=dens, endpoint_exponents=(-0.5, -0.5),
        tail_exponent=1.0 / sym.p - 1.0, finite_mass=False, name=f"rho_{j}",
    )


def conformal_map(gamma1, lam: complex) -> complex:
    """phi(lambda): exterior of [alpha, beta] onto the unit disk, phi(inf)=0."""
    if isinstance(gamma1, Cut):
        alpha, beta = gamma1.lo, gamma1.hi
    else:
        alpha, beta = gamma1
    lam = complex(lam)
    if lam.imag == 0.0 and alpha <= lam.real <= beta:
        raise OnCut(f"lambda = {lam.real:.8g} lies in [{alpha:.6g}, {beta:.6g}]")
    w = (2.0 * lam - alpha - beta) / (beta - alpha)
    s = cmath.sqrt(w * w - 1.0)
    if abs(w + s) < 1.0:
        s = -s
    return 1.0 / (w + s)


def jacobi_perron(sym: SymbolCoeffs, lam: complex, depth: int) -> tuple[complex, ...]:
    """Vector continued fraction truncated at `depth` floors.

    Converges to (z_0, z_0^2, ..., z_0^p) for lambda outside a disk
    holding Gamma_1.  The vector division is
    (n_1..n_p)/(y_1..y_p) = (n_1/y_p, n_2 y_1/y_p, ..., n_p y_{p-1}/y_p).
    """
    p = sym.p
    lam = complex(lam)
    ones = np.ones(p, dtype=complex)
    tail_num = ones.copy()
    tail_num[0] = -sym.a[p]
    tail_den = np.zeros(p, dtype=complex)
    for i in range(1, p):
        tail_den[p - 1 - i] = -sym.a[i]
    tail_den[p - 1] = lam - sym.a[0]

    def floor_parts(m: int):
        if m > p:
            return tail_num, tail_den
        den = np.zeros(p, dtype=complex)
        den[p - 1] = lam - sym.a[0]
        for i in range(1, m):
            den[p - 1 - i] = -sym.a[i]
        return ones, den

    state = np.zeros(p, dtype=complex)
    for m in range(depth, 0, -1):
        num, den = floor_parts(m)
        y = den + state
        if abs(y[-1]) <= 1e-14 * (1.0 + abs(lam)):
            raise DivisionBlowup(f"floor {m}: trailing denominator {y[-1]:.3e}")
        base = np.concatenate(([1.0 + 0.0j], y[:-1])) / y[-1]
        state = num * base
    return tuple(state)


def log_derivative_identity_residual(sym: SymbolCoeffs, k: int, lam: complex) -> float:
    """|z_k'/z_k + s_k-transform - s_{k+1}-transform| at lambda.

    The transforms are integrals ds_i(x)/(x - lambda); indices 0 and p+1
    contribute zero.
    """
    struct = critical_structure(sym)
    bv = solve_branches(sym, lam)
    zk = bv.z[k]
    lhs = (1.0 / complex(_eval_da(sym, np.asarray(zk)))) / zk

    def transform(i: int) -> complex:
        if i < 1 or i > sym.p:
            return 0.0
        return -cauchy_transform(s_measure(sym, i, struct), lam)

    return abs(lhs + transform(k) - transform(k + 1))
