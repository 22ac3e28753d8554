"""Phase diagram of the PT-symmetric impurity chain.

All strengths here are in units of the hopping J. The PT-symmetric
region 0 <= gamma <= gamma_PT(N, m) is the region where every
eigenvalue is real; it is located by bisection on the real-root count
of the secular function, certified on both ends against the full
complex spectrum. Landmarks reproduced by this module:

  * impurities at nearest sites (m = N/2, even N): gamma_PT = J, and
    the breaking is maximal (all N eigenvalues complex at once);
  * impurities at next-nearest sites (m = (N-1)/2, odd N): gamma_PT
    tends to J/2 from above, the breaking is sequential and saturates
    at N - 1 complex eigenvalues, one E = 0 mode staying real;
  * interior impurities: gamma_PT shrinks like 1/N (algebraic
    fragility), and the broken fraction saturates at 2m/N.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .chain import ChainSpec
from .secular import find_real_roots
from .spectral import ConvergenceError, all_eigenvalues, dense_eigenvalues

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CriticalResult:
    """Certified bracket around the PT transition of one (N, m) chain."""

    n_sites: int
    impurity_site: int
    gamma_pt: float
    gamma_low: float
    gamma_high: float
    tolerance: float
    n_complex_just_above: int


@dataclass(frozen=True)
class PhasePoint:
    n_sites: int
    impurity_site: int
    mu: float
    gamma_pt: float
    n_complex_saturated: int


@dataclass(frozen=True)
class ScalingFit:
    """Log-log fit gamma_PT ~ N**exponent at fixed mu = m/N."""

    mu: float
    sample_sizes: tuple[int, ...]
    gamma_values: tuple[float, ...]
    exponent: float
    residual: float


def _count_real(n_sites: int, impurity_site: int, gamma: float) -> int:
    return find_real_roots(ChainSpec(n_sites, impurity_site, gamma)).total_count


def critical_gamma(n_sites: int, impurity_site: int, tolerance: float = 1e-8,
                   gamma_cap: float = 2.0, use_dense: bool = False) -> CriticalResult:
    """Critical impurity strength gamma_PT in units of J, by bisection.

    The predicate "all N quasimomenta real" is evaluated through the
    secular root count (or the dense eigensolver when use_dense is set,
    the cross-validation route). The final bracket [gamma_low,
    gamma_high] has width <= tolerance and is certified against the
    full spectrum: entirely real at gamma_low, at least one conjugate
    pair just above gamma_high. The certification point starts 0.1
    percent beyond gamma_high and backs off geometrically to 5 percent:
    freshly merged pairs leave the axis with imaginary parts that can
    sit below classification resolution (at N = 501 the pairs hug the
    axis within 1e-6 J for several 1e-4 J past the transition), so the
    checkpoint must be far enough out to resolve them.
    n_complex_just_above is the complex count at the first resolvable
    checkpoint (four for interior impurities, where a pair near the
    zone center and its zone-boundary mirror break together).

    Raises ValueError when no transition exists below gamma_cap and
    ConvergenceError when the end certificates disagree with the
    bisection predicate.
    """
    if tolerance <= 0:
        raise ValueError(f"tolerance must be > 0, got {tolerance}")
    if use_dense:
        predicate = lambda g: dense_eigenvalues(
            ChainSpec(n_sites, impurity_site, g)).n_real == n_sites
    else:
        predicate = lambda g: _count_real(n_sites, impurity_site, g) == n_sites
    if not predicate(0.0):
        raise ConvergenceError(
            f"count of real quasimomenta is not N at gamma = 0 for "
            f"N={n_sites}, m={impurity_site}")
    if predicate(gamma_cap):
        raise ValueError(
            f"no PT transition found below gamma_cap = {gamma_cap} J for "
            f"N={n_sites}, m={impurity_site}")
    lo, hi = 0.0, gamma_cap
    while hi - lo > tolerance:
        mid = 0.5 * (lo + hi)
        if predicate(mid):
            lo = mid
        else:
            hi = mid
    s_lo = all_eigenvalues(ChainSpec(n_sites, impurity_site, lo))
    if s_lo.n_real != n_sites:
        raise ConvergenceError(
            f"certification failed at bracket [{lo!r}, {hi!r}]: "
            f"n_real({lo!r})={s_lo.n_real} below the transition")
    n_above = 0
    for rel in (1e-3, 1e-2, 5e-2):
        s_hi = all_eigenvalues(ChainSpec(n_sites, impurity_site,
                                         hi * (1.0 + rel)))
        if s_hi.n_complex >= 2:
            n_above = s_hi.n_complex
            break
    else:
        raise ConvergenceError(
            f"certification failed at bracket [{lo!r}, {hi!r}]: no "
            f"conjugate pair resolvable within 5 percent above gamma_high")
    return CriticalResult(n_sites=n_sites, impurity_site=impurity_site,
                          gamma_pt=0.5 * (lo + hi), gamma_low=lo, gamma_high=hi,
                          tolerance=tolerance, n_complex_just_above=n_above)


def broken_count(n_sites: int, impurity_site: int, gamma: float,
                 tolerance: float = 1e-8, use_dense: bool = False) -> int:
    """Number of complex eigenvalues at one point of the phase diagram.

    Grows in steps as gamma sweeps upward and saturates at 2m.
    """
    spec = ChainSpec(n_sites, impurity_site, gamma)
    s = dense_eigenvalues(spec, tolerance) if use_dense \
        else all_eigenvalues(spec, tolerance)
    return s.n_complex


def odd_closest_threshold(n_sites: int) -> float:
    """Closed-form transition estimate J/(2 cos k_d) for odd N, m = (N-1)/2.

    Along the real-root branch of the next-nearest secular form,
    solving for the strength gives

        (gamma/J)^2(k) = -sin(k(N+1)) sin(k) / (2 cos(k) sin^2(k(N0-1)))

    which is a positive hump on (pi/(N+1), 2pi/(N+1)); the first pair of
    quasimomenta merges at its peak k_d, and J/(2 cos k_d) tends to J/2
    from above as N grows. The estimate is asymptotic: it sits a few
    parts in 1e4 above the certified critical_gamma at N = 13 and
    converges rapidly with N (use critical_gamma as ground truth).
    """
    if n_sites % 2 != 1 or n_sites < 5:
        raise ValueError(f"odd N >= 5 required, got {n_sites}")
    n0 = (n_sites + 1) // 2

    def g2(k):
        return (-np.sin(k * (n_sites + 1)) * np.sin(k)
                / (2.0 * np.cos(k) * np.sin(k * (n0 - 1)) ** 2))

    lo = math.pi / (n_sites + 1)
    hi = 2.0 * math.pi / (n_sites + 1)
    pre = np.linspace(lo, hi, 257)[1:-1]
    k0 = pre[np.argmax(g2(pre))]
    h = (hi - lo) / 256.0
    r = minimize_scalar(lambda k: -g2(k), bounds=(k0 - h, k0 + h),
                        method="bounded", options={"xatol": 1e-14})
    k_d = float(r.x)
    if not lo < k_d < hi:
        raise ConvergenceError(f"merge point {k_d} escaped ({lo}, {hi})")
    return 1.0 / (2.0 * math.cos(k_d))


def approx_real_root_count(n_sites: int, mu: float) -> int:
    """Large-N estimate of the surviving real-root count, round(N(1-2mu)).

    Valid only for interior impurities: the approximation breaks down
    as mu -> 0 (gamma_PT stays at J) and as mu -> 1/2 (gamma_PT stays
    finite), so those limits are rejected.
    """
    if not 0.0 < mu < 0.5 or n_sites * (1.0 - 2.0 * mu) < 1.0:
        raise ValueError(
            f"mu = {mu} outside the validity window: the large-N count "
            "N(1-2mu) applies to interior impurities only and is invalid "
            "in both limits mu -> 0 and mu -> 1/2")
    return round(n_sites * (1.0 - 2.0 * mu))


def saturation_gamma(n_sites: int) -> float:
    """Strength beyond which the broken count has saturated, units of J."""
    return max(2.0, (n_sites + 1) / (3.0 * math.pi) + 0.5)


def sweep_phase_diagram(n_sites: int, m_values=None, tolerance: float = 1e-8,
                        use_dense: bool = False) -> list[PhasePoint]:
    """gamma_PT and the saturated broken count across impurity positions.

    m_values defaults to every admissible site 1..N//2. Failures at
    single points are logged and skipped so one bad point cannot sink
    a whole sweep.
    """
    if m_values is None:
        m_values = range(1, n_sites // 2 + 1)
    gamma_sat = saturation_gamma(n_sites)
    points = []
    for m in m_values:
        try:
            crit = critical_gamma(n_sites, m, tolerance, use_dense=use_dense)
            nc = broken_count(n_sites, m, gamma_sat, tolerance, use_dense=use_dense)
        except (ValueError, ConvergenceError) as err:
            log.warning("sweep point N=%d m=%d failed: %s", n_sites, m, err)
            continue
        points.append(PhasePoint(n_sites=n_sites, impurity_site=m,
                                 mu=m / n_sites, gamma_pt=crit.gamma_pt,
                                 n_complex_saturated=nc))
    return points


def fit_fragility_scaling(mu: float, sample_sizes, tolerance: float = 1e-8,
                          use_dense: bool = False) -> ScalingFit:
    """Ordinary least squares of log gamma_PT against log N at fixed mu.

    Every size must make m = mu*N an admissible integer site and at
    least four sizes are required. Interior mu gives an exponent near
    -1 (algebraic fragility); mu = 1/2 gives 0 (gamma_PT pinned at J).
    residual is the rms misfit of the log-log line.
    """
    sizes = tuple(int(s) for s in sample_sizes)
    if len(sizes) < 4:
        raise ValueError(f"need at least 4 sizes for a scaling fit, got {len(sizes)}")
    gammas = []
    for n in sizes:
        m_exact = mu * n
        m = round(m_exact)
        if abs(m_exact - m) > 1e-9 or not 1 <= m <= n // 2:
            raise ValueError(
                f"mu = {mu} does not give an integer site 1..N//2 for N = {n}")
        gammas.append(critical_gamma(n, m, tolerance, use_dense=use_dense).gamma_pt)
    lx = np.log(np.asarray(sizes, dtype=float))
    ly = np.log(np.asarray(gammas))
    design = np.column_stack([lx, np.ones_like(lx)])
    coef, *_ = np.linalg.lstsq(design, ly, rcond=None)
    fit = design @ coef
    rms = float(np.sqrt(np.mean((ly - fit) ** 2)))
    return ScalingFit(mu=mu, sample_sizes=sizes, gamma_values=tuple(gammas),
                      exponent=float(coef[0]), residual=rms)
