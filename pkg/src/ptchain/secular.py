"""Secular equation for the real quasimomenta of the impurity chain.

Eigenstates with energy E = -2J cos(k) exist when k solves

    M(k) = [sin^2(k(m+1)) + (g/J)^2 sin^2(km)] sin(k(N-2m+1))
           + sin^2(km) sin(k(N-2m-1))
           - 2 sin(km) sin(k(m+1)) sin(k(N-2m))  =  0

with 0 < k < pi and g the impurity strength. M obeys
M(pi - k) = (-1)^N M(k), so roots come in mirror pairs (k, pi - k) and
k = pi/2 is a root for every odd N (the persistent E = 0 mode). At g = 0
the N roots are the open-chain values k_alpha = alpha*pi/(N+1). As g
grows, adjacent roots drift together, merge pairwise into double roots
and leave the real axis; a full count (multiplicities included) below N
signals spontaneous PT-symmetry breaking.

Two closed reductions of M are kept alongside: impurities at nearest
sites (m = N/2, even N) and at next-nearest sites (m = (N-1)/2, odd N).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain import ChainSpec


class GridResolutionError(RuntimeError):
    """Scan grid cannot certify the root count; retry with a finer grid."""


@dataclass(frozen=True)
class RootSet:
    """Real quasimomentum roots of the secular function on (0, pi).

    k_values are ascending, one entry per distinct root; multiplicities
    holds 1 for simple roots and 2 for merged (double) roots; residuals
    holds |M(k)| after refinement. total_count sums multiplicities and
    equals N exactly when the PT symmetry is unbroken.
    """

    k_values: np.ndarray
    multiplicities: np.ndarray
    residuals: np.ndarray
    total_count: int

    def __post_init__(self):
        if not (len(self.k_values) == len(self.multiplicities) == len(self.residuals)):
            raise ValueError("k_values, multiplicities, residuals must align")


def eval_secular(k, spec: ChainSpec):
    """Secular function M(k). Accepts scalar or array k, vectorized.

    Dimensionless: gamma enters only through (gamma/J)^2.
    """
    k = np.asarray(k, dtype=float)
    n, m = spec.n_sites, spec.impurity_site
    g2 = spec.reduced_gamma ** 2
    s = np.sin
    out = ((s(k * (m + 1)) ** 2 + g2 * s(k * m) ** 2) * s(k * (n - 2 * m + 1))
           + s(k * m) ** 2 * s(k * (n - 2 * m - 1))
           - 2 * s(k * m) * s(k * (m + 1)) * s(k * (n - 2 * m)))
    return out if out.shape else float(out)


def _eval_secular_dk(k, spec: ChainSpec):
    """dM/dk, used for the safeguarded Newton polish."""
    k = np.asarray(k, dtype=float)
    n, m = spec.n_sites, spec.impurity_site
    g2 = spec.reduced_gamma ** 2
    a, b = m, m + 1
    c, d, e = n - 2 * m + 1, n - 2 * m - 1, n - 2 * m
    sa, ca = np.sin(a * k), np.cos(a * k)
    sb, cb = np.sin(b * k), np.cos(b * k)
    return ((2 * b * sb * cb + 2 * a * g2 * sa * ca) * np.sin(c * k)
            + c * (sb ** 2 + g2 * sa ** 2) * np.cos(c * k)
            + 2 * a * sa * ca * np.sin(d * k)
            + d * sa ** 2 * np.cos(d * k)
            - 2 * (a * ca * sb * np.sin(e * k)
                   + b * sa * cb * np.sin(e * k)
                   + e * sa * sb * np.cos(e * k)))


def eval_secular_nearest(k, n_sites: int, gamma: float, hopping: float = 1.0):
    """Nearest-impurity reduction, even N with m = N/2.

    Returns J^2 sin^2(k(N/2+1)) - (J^2 - gamma^2) sin^2(kN/2); its zeros
    on (0, pi) coincide with those of eval_secular. At gamma = J the
    roots collapse onto the doubly degenerate set k_n = 2n*pi/(N+2); for
    gamma > J the expression is a sum of two non-negative terms and has
    no real zeros, so all N eigenvalues turn complex at once.
    """
    if n_sites % 2 != 0:
        raise ValueError(f"nearest-impurity form needs even N, got {n_sites}")
    k = np.asarray(k, dtype=float)
    half = n_sites // 2
    out = (hopping ** 2 * np.sin(k * (half + 1)) ** 2
           - (hopping ** 2 - gamma ** 2) * np.sin(k * half) ** 2)
    return out if out.shape else float(out)


def eval_secular_next_nearest(k, n_sites: int, gamma: float, hopping: float = 1.0):
    """Next-nearest reduction, odd N with m = (N-1)/2 and N0 = (N+1)/2.

    Returns cos(k)[sin^2(kN0) + (gamma/J)^2 sin^2(k(N0-1))]
            - sin(kN0) sin(k(N0-1)).
    k = pi/2 is a zero for every gamma; the remaining roots vanish
    pairwise with growing gamma until only the E = 0 mode survives.
    """
    if n_sites % 2 != 1:
        raise ValueError(f"next-nearest form needs odd N, got {n_sites}")
    k = np.asarray(k, dtype=float)
    n0 = (n_sites + 1) // 2
    g2 = (gamma / hopping) ** 2
    out = (np.cos(k) * (np.sin(k * n0) ** 2 + g2 * np.sin(k * (n0 - 1)) ** 2)
           - np.sin(k * n0) * np.sin(k * (n0 - 1)))
    return out if out.shape else float(out)


def _bisect_many(f, lo, hi, iters: int = 80):
    # sign(f(lo)) is recomputed once; brackets must be genuine
    slo = np.sign(f(lo))
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        keep_left = np.sign(f(mid)) == slo
        lo = np.where(keep_left, mid, lo)
        hi = np.where(keep_left, hi, mid)
    return 0.5 * (lo + hi)


def _ternary_min_many(f, lo, hi, iters: int = 90):
    # unimodal minimization on each bracket
    for _ in range(iters):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        left = f(m1) <= f(m2)
        hi = np.where(left, m2, hi)
        lo = np.where(left, lo, m1)
    return 0.5 * (lo + hi)


def find_real_roots(spec: ChainSpec, grid_points: int | None = None,
                    tolerance: float | None = None) -> RootSet:
    """All real roots of M on (0, pi) with multiplicities.

    The scan runs on (0, pi/2] and mirrors through pi - k, which makes
    the mirror-pair symmetry of the output exact. Simple roots come from
    sign-change brackets (vectorized bisection plus one safeguarded
    Newton step); merged pairs hide in sign-preserving dips of M, which
    are located from sampled local minima and resolved by bounded
    minimization: a dip that crosses zero splits into two brackets, a
    dip bottom within tolerance*scale of zero is a double root, anything
    else is no root. For odd N the root k = pi/2 is asserted
    analytically, never searched.

    grid_points defaults to 16*N and must be >= 8*N; tolerance is the
    absolute residual bound on |M| and defaults to 1e-10*max(1, (g/J)^2).

    Raises GridResolutionError when the scan cannot certify the count.
    """
    n = spec.n_sites
    if grid_points is None:
        grid_points = 16 * n
    if grid_points < 8 * n:
        raise ValueError(f"grid_points must be >= 8*N = {8 * n}, got {grid_points}")
    if tolerance is None:
        tolerance = 1e-10 * max(1.0, spec.reduced_gamma ** 2)

    odd = n % 2 == 1
    half_pts = grid_points // 2
    top = np.pi / 2
    if odd:
        top = np.pi / 2 - 1e-9  # keep the analytic pi/2 zero out of the scan
    grid = np.linspace(top / half_pts, top, half_pts)
    f = lambda k: eval_secular(k, spec)
    v = f(grid)
    scale = float(np.max(np.abs(v)))
    if scale == 0.0:
        raise GridResolutionError("secular function vanished on the whole grid")
    double_thresh = tolerance * scale

    roots: list[float] = []
    mults: list[int] = []

    # endpoint double root at pi/2 (even N only; odd N never samples pi/2)
    endpoint_double = (not odd) and abs(v[-1]) <= double_thresh
    n_cells = len(grid) - 1
    last_scan_cell = n_cells - 1 if endpoint_double else n_cells

    sgn = np.sign(v)
    exact = np.where(v == 0.0)[0]
    for i in exact:
        if not endpoint_double or i != len(grid) - 1:
            roots.append(float(grid[i]))
            mults.append(1)
        sgn[i] = np.nan  # consume: suppress adjacent cells and dip candidacy

    cells = np.arange(last_scan_cell)
    change = (sgn[cells] * sgn[cells + 1]) < 0
    blo = grid[cells[change]]
    bhi = grid[cells[change] + 1]

    # sampled local minima of |M| with no adjacent sign change: dip candidates
    interior = np.arange(1, len(grid) - (2 if endpoint_double else 1))
    with np.errstate(invalid="ignore"):
        is_min = (np.abs(v[interior]) < np.abs(v[interior - 1])) \
            & (np.abs(v[interior]) <= np.abs(v[interior + 1])) \
            & (sgn[interior - 1] == sgn[interior]) & (sgn[interior] == sgn[interior + 1])
    cand = interior[is_min]
    if len(cand):
        side = sgn[cand]  # sign of M around each dip
        clo, chi = grid[cand - 1], grid[cand + 1]
        khat = _ternary_min_many(
            lambda k: np.where(side > 0, 1.0, -1.0) * f(k), clo, chi)
        vhat = f(khat)
        crossing = np.sign(vhat) == -side
        tangent = ~crossing & (np.abs(vhat) <= double_thresh)
        # crossing dips hold two simple roots; bracket both halves
        blo = np.concatenate([blo, clo[crossing], khat[crossing]])
        bhi = np.concatenate([bhi, khat[crossing], chi[crossing]])
        for kk in khat[tangent]:
            roots.append(float(kk))
            mults.append(2)

    if len(blo):
        simple = _bisect_many(f, blo, bhi)
        # one safeguarded Newton polish per root
        dk = f(simple) / _eval_secular_dk(simple, spec)
        polished = simple - dk
        ok = np.isfinite(polished) & (np.abs(dk) <= (bhi - blo)) \
            & (np.abs(f(polished)) <= np.abs(f(simple)))
        simple = np.where(ok, polished, simple)
        roots.extend(float(r) for r in simple)
        mults.extend([1] * len(simple))

    if endpoint_double:
        roots.append(float(np.pi / 2))
        mults.append(2)

    # dedupe sign-noise twins (distinct brackets converging to one root)
    order = np.argsort(roots)
    half_k: list[float] = []
    half_m: list[int] = []
    for idx in order:
        if half_k and abs(roots[idx] - half_k[-1]) < 1e-12 and mults[idx] == half_m[-1] == 1:
            continue
        half_k.append(roots[idx])
        half_m.append(mults[idx])

    # an exact tangency can land on a grid point and get consumed as a
    # simple zero, or split into two sub-resolution brackets by noise.
    # 2|M'|/|M''| at a simple root estimates the distance to its partner;
    # below the fold scale the two are one double root.
    fold = 2e-6
    merged_k: list[float] = []
    merged_m: list[int] = []
    for kk, mm in zip(half_k, half_m):
        if (merged_k and mm == 1 and merged_m[-1] == 1
                and kk - merged_k[-1] <= fold):
            merged_k[-1] = 0.5 * (merged_k[-1] + kk)
            merged_m[-1] = 2
            continue
        merged_k.append(kk)
        merged_m.append(mm)
    half_k, half_m = merged_k, merged_m
    for idx, (kk, mm) in enumerate(zip(half_k, half_m)):
        if mm != 1:
            continue
        h = min(np.pi / (32 * n), kk / 2)
        d1 = float(_eval_secular_dk(kk, spec))
        c2 = (float(_eval_secular_dk(kk + h, spec))
              - float(_eval_secular_dk(kk - h, spec))) / (2.0 * h)
        if c2 != 0.0 and 2.0 * abs(d1 / c2) <= fold:
            half_m[idx] = 2

    # M is odd about pi/2, so the zero mode zero there is odd-order:
    # simple generically, third order when a level pair crosses E = 0 on
    # top of it. |M'| against the cubic term at the fold scale 1e-6
    # decides whether that pair is resolvable from pi/2 at all; when it
    # is not, scan artifacts inside the cancellation-noise zone around
    # pi/2 are the same degenerate root and would double-count it.
    mid_mult = 1
    if odd:
        c1 = float(_eval_secular_dk(np.pi / 2, spec))
        h = 0.5 / n
        c3 = 2.0 * (float(_eval_secular_dk(np.pi / 2 - h, spec)) - c1) / h ** 2
        if abs(c1) <= 1e-12 * abs(c3):
            mid_mult = 3
            keep = [i for i, kk in enumerate(half_k) if np.pi / 2 - kk > 1e-5]
            half_k = [half_k[i] for i in keep]
            half_m = [half_m[i] for i in keep]

    all_k: list[float] = []
    all_m: list[int] = []
    for kk, mm in zip(half_k, half_m):
        all_k.append(kk)
        all_m.append(mm)
    if odd:
        all_k.append(float(np.pi / 2))
        all_m.append(mid_mult)
    for kk, mm in zip(reversed(half_k), reversed(half_m)):
        if kk < np.pi / 2:  # endpoint double sits on the mirror axis
            all_k.append(float(np.pi - kk))
            all_m.append(mm)

    k_arr = np.asarray(all_k)
    m_arr = np.asarray(all_m, dtype=int)
    res = np.abs(eval_secular(k_arr, spec)) if len(k_arr) else np.zeros(0)
    total = int(m_arr.sum())
    if total > n:
        raise GridResolutionError(
            f"counted {total} roots for N = {n}; grid of {grid_points} points "
            "cannot certify the count, rerun with a finer grid")
    bad = (m_arr == 1) & (res > tolerance) & (k_arr != np.pi / 2)
    if np.any(bad):
        worst = float(res[bad].max())
        raise GridResolutionError(
            f"root residual {worst:.3e} exceeds tolerance {tolerance:.3e}; "
            "rerun with a finer grid")
    return RootSet(k_values=k_arr, multiplicities=m_arr, residuals=res,
                   total_count=total)
