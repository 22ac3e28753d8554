"""Complex spectrum of the impurity chain via its characteristic polynomial.

The Hamiltonian is tridiagonal, so det(H - E) obeys the three-term
recurrence

    D_n = (d_n - E) D_{n-1} - J^2 D_{n-2},   D_0 = 1, D_{-1} = 0

with d_n the diagonal (i*gamma at m, -i*gamma at the mirror site, zero
elsewhere). D_N grows like (2J)^N, so the recurrence runs with dynamic
power-of-two rescaling and a separate exponent accumulator; Newton
ratios D/D' are scale free. All N eigenvalues come from an
Aberth-Ehrlich simultaneous iteration seeded with the gamma = 0
spectrum, followed by a canonicalization stage shared by every spectrum
producer: pairs closer than the exceptional-point window are collapsed
onto the critical point of the polynomial (no attempt to separate
near-defective pairs), and the multiset is conjugate-symmetrized so it
is exactly closed under complex conjugation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .chain import ChainSpec, analytic_spectrum_hermitian, hamiltonian_diagonals

_EP_WINDOW = 1e-6   # times 2J: unconditional collapse radius for defective pairs
_EP_WIDE = 5e-5     # times 2J: verified collapse radius (eps**(1/3) noise orbits)
_MAX_SWEEPS = 500


class ConvergenceError(RuntimeError):
    """Root iteration failed to converge; carries the best residual."""


@dataclass(frozen=True)
class Spectrum:
    """Canonicalized eigenvalue multiset of one chain configuration.

    eigenvalues are sorted by (Re, Im) and exactly closed under complex
    conjugation; entries classified real have imaginary part exactly 0.
    tolerance is the classification tolerance: |Im E| <= tolerance*(2J).
    """

    eigenvalues: np.ndarray
    n_real: int
    n_complex: int
    tolerance: float

    @property
    def broken(self) -> bool:
        return self.n_complex > 0


@dataclass(frozen=True)
class SpectrumClassification:
    n_real: int
    n_complex: int
    degree_of_breaking: float
    max_imag: float


@dataclass(frozen=True)
class RegionCoeffs:
    """Piecewise amplitudes of the plane-wave form of an eigenstate.

    psi_n = a sin(kn) up to the gain site, p sin(kn) + q cos(kn) between
    the impurities, b sin(k(N+1-n)) from the loss site on. Diagnostic
    only in the broken phase, where k is complex.
    """

    a: complex
    p: complex
    q: complex
    b: complex


@dataclass(frozen=True)
class Eigenvector:
    energy: complex
    amplitudes: np.ndarray
    quasimomentum: complex
    coeffs: RegionCoeffs
    residual: float
    degenerate: bool = False


def _char_poly_scaled(energies: np.ndarray, spec: ChainSpec, order: int = 1):
    """D_N and up to three derivatives at each energy, as mantissas times 2**exp2.

    order 0..3 selects how many derivatives are carried. All rows share
    one exponent per point, so ratios between them ignore exp2.
    """
    e = np.atleast_1d(np.asarray(energies, dtype=complex))
    diag, off = hamiltonian_diagonals(spec)
    j2 = spec.hopping ** 2
    d1 = np.ones_like(e)
    d2 = np.zeros_like(e)
    p1 = np.zeros_like(e)
    p2 = np.zeros_like(e)
    q1 = np.zeros_like(e)
    q2 = np.zeros_like(e)
    r1 = np.zeros_like(e)
    r2 = np.zeros_like(e)
    exp2 = np.zeros(e.shape, dtype=np.int64)
    for n in range(spec.n_sites):
        a = diag[n] - e
        d = a * d1 - j2 * d2
        p = a * p1 - d1 - j2 * p2 if order >= 1 else p1
        q = a * q1 - 2.0 * p1 - j2 * q2 if order >= 2 else q1
        r = a * r1 - 3.0 * q1 - j2 * r2 if order >= 3 else r1
        d2, p2, q2, r2 = d1, p1, q1, r1
        d1, p1, q1, r1 = d, p, q, r
        mag = np.abs(d1) + np.abs(d2)
        if order >= 1:
            mag = mag + np.abs(p1) + np.abs(p2)
        if order >= 2:
            mag = mag + np.abs(q1) + np.abs(q2)
        if order >= 3:
            mag = mag + np.abs(r1) + np.abs(r2)
        big = mag > 2.0 ** 200
        small = (mag > 0) & (mag < 2.0 ** -200)
        if np.any(big | small):
            _, ex = np.frexp(np.where(mag > 0, mag, 1.0))
            ex = np.where(big | small, ex, 0).astype(np.int64)
            fac = np.exp2(-ex.astype(float))  # exact powers of two
            d1, d2 = d1 * fac, d2 * fac
            p1, p2 = p1 * fac, p2 * fac
            q1, q2 = q1 * fac, q2 * fac
            r1, r2 = r1 * fac, r2 * fac
            exp2 += ex
    return d1, p1, q1, r1, exp2


def char_poly_eval(energy, spec: ChainSpec):
    """det(H - E) at one energy or an array of energies.

    The determinant itself can overflow double precision for chains of
    a couple thousand sites; the root-finding path never unscales.
    """
    d, _, _, _, exp2 = _char_poly_scaled(energy, spec, order=0)
    out = d * np.exp2(exp2.astype(float))
    return out if np.ndim(energy) else complex(out[0])


def _proximity_components(z: np.ndarray, window: float):
    """Connected components of the pairwise-distance graph, size >= 2 only."""
    n = len(z)
    dist = np.abs(z[:, None] - z[None, :])
    np.fill_diagonal(dist, np.inf)
    close = dist < window
    comp = -np.ones(n, dtype=int)
    nc = 0
    for i in range(n):
        if comp[i] >= 0:
            continue
        stack = [i]
        comp[i] = nc
        while stack:
            j = stack.pop()
            for kk in np.where(close[j])[0]:
                if comp[kk] < 0:
                    comp[kk] = nc
                    stack.append(kk)
        nc += 1
    return [np.where(comp == c)[0] for c in range(nc)
            if np.sum(comp == c) >= 2]


def _newton_on_derivative(spec: ChainSpec, start: complex, level: int,
                          window: float):
    """Newton on D' (level 1) or D'' (level 2) from start.

    A defective root of multiplicity level+1 is a simple zero of the
    level-th derivative, so convergence there is quadratic. Returns None
    when the iteration tries to leave the neighborhood (a genuine
    cluster of separate roots, not a multiple one).
    """
    center = complex(start)
    for _ in range(60):
        _, dp, dq, dr, _ = _char_poly_scaled(
            np.array([center]), spec, order=level + 1)
        num, den = (dp[0], dq[0]) if level == 1 else (dq[0], dr[0])
        if den == 0:
            break
        step = num / den
        if abs(step) > 5 * window:
            return None
        center -= step
        if abs(step) < 1e-15 * 2.0 * spec.hopping:
            break
    return center


def _log2_char(spec: ChainSpec, values: np.ndarray) -> np.ndarray:
    """log2 |det(H - E)|, overflow-free via the carried exponent."""
    d, _, _, _, exp2 = _char_poly_scaled(values, spec, order=0)
    with np.errstate(divide="ignore"):
        return np.log2(np.abs(d)) + exp2


def _conjugation_invariant(vals: np.ndarray, radius: float) -> bool:
    """True when the multiset matches its conjugate to << its own radius.

    Converged simple eigenvalues are conjugate-closed to machine
    precision even when close together; the noise orbit around a
    defective root has conjugate asymmetry of order the radius itself.
    """
    rem = list(np.conj(vals))
    worst = 0.0
    for v in vals:
        jj = int(np.argmin([abs(v - w) for w in rem]))
        worst = max(worst, abs(v - rem.pop(jj)))
    return worst <= 1e-2 * radius


def _collapse_clusters(z: np.ndarray, spec: ChainSpec):
    """Exceptional-point handling shared by all spectrum producers.

    Values closer than 1e-6*(2J) collapse unconditionally onto the
    adjacent critical point of det(H - E): Newton on D' for a pair, on
    D'' for a triple (zero mode plus a pair crossing E = 0), plain mean
    beyond that. Root noise at a defective point scales like eps**(1/2)
    or eps**(1/3), which can exceed the tight window, so a second pass
    with window 5e-5*(2J) catches the wider orbits; it folds a cluster
    only when it actually looks like one multiple root: conjugate
    asymmetry of order the cluster radius, refined point inside the
    hull, and |D| there no larger than at the members. Genuine
    neighboring eigenvalues fail those checks and stay untouched.
    Returns the collapsed values and a degeneracy mask.
    """
    scale = 2.0 * spec.hopping
    out = z.copy()
    degenerate = np.zeros(len(z), dtype=bool)
    for window, verify in ((_EP_WINDOW * scale, False),
                           (_EP_WIDE * scale, True)):
        for members in _proximity_components(out, window):
            vals = out[members]
            mean = vals.mean()
            radius = float(np.max(np.abs(vals - mean)))
            if radius == 0.0:
                continue  # already collapsed exactly
            if verify and (len(members) > 3
                           or _conjugation_invariant(vals, radius)):
                continue
            refined = None
            if len(members) in (2, 3):
                refined = _newton_on_derivative(
                    spec, mean, len(members) - 1, window)
            if verify:
                if refined is None or abs(refined - mean) > 3.0 * radius:
                    continue
                lg = _log2_char(spec, np.append(vals, refined))
                if lg[-1] > np.max(lg[:-1]) + 4.0:
                    continue
            out[members] = mean if refined is None else refined
            degenerate[members] = True
    return out, degenerate


def _symmetrize(z: np.ndarray, spec: ChainSpec, tolerance: float):
    """Conjugate-symmetrize and classify; returns (values, n_real).

    Values with |Im| <= tolerance*2J are real. The rest must close under
    conjugation; matched pairs are averaged to (w, conj(w)). An unmatched
    value can still be legitimate: near a cluster of nearly multiple real
    roots (a transition point with a zero mode on top, say) the iteration
    cannot resolve imaginary parts below |D/D'| ~ 1e-8, and that rounding
    residue has no conjugate partner. Unmatched values inside the pairing
    slack are folded onto the axis; larger ones are a solver failure.
    """
    im_tol = tolerance * 2.0 * spec.hopping
    slack = 1e-5 * (2.0 * spec.hopping + spec.gamma)
    z = z.copy()
    real_mask = np.abs(z.imag) <= im_tol
    z[real_mask] = z[real_mask].real
    rest = np.where(~real_mask)[0]
    upper = [i for i in rest if z[i].imag > 0]
    lower = [i for i in rest if z[i].imag < 0]
    used = np.zeros(len(lower), dtype=bool)
    orphans = []
    for i in upper:
        best, bestd = -1, np.inf
        for jj, j in enumerate(lower):
            if used[jj]:
                continue
            d = abs(np.conj(z[i]) - z[j])
            if d < bestd:
                best, bestd = jj, d
        if bestd > slack:
            orphans.append(i)
            continue
        j = lower[best]
        used[best] = True
        w = 0.5 * (z[i] + np.conj(z[j]))
        z[i], z[j] = w, np.conj(w)
    orphans.extend(j for jj, j in enumerate(lower) if not used[jj])
    for i in orphans:
        if abs(z[i].imag) > slack:
            raise ConvergenceError(
                f"conjugate pairing failed: unmatched eigenvalue {z[i]:.6g}")
        z[i] = complex(z[i].real)
    # E -> -E closure puts broken pairs exactly on the imaginary axis;
    # pin the rounding residue in Re so both routes sort identically
    z.real[np.abs(z.real) <= im_tol] = 0.0
    order = np.lexsort((z.imag, z.real))
    z = z[order]
    return z, int(np.sum(z.imag == 0.0))


def all_eigenvalues(spec: ChainSpec, tolerance: float = 1e-8) -> Spectrum:
    """All N eigenvalues by simultaneous polynomial root iteration.

    Seeds are the gamma = 0 spectrum with a uniform i*1e-3*J jitter.
    Convergence is cubic away from degeneracies; near-defective pairs
    stall and are handed to the shared collapse stage. tolerance is the
    real-classification tolerance in units of 2J.

    Raises ConvergenceError when the sweep cap is hit far from roots.
    """
    n = spec.n_sites
    scale = 2.0 * spec.hopping + spec.gamma
    z = analytic_spectrum_hermitian(n, spec.hopping).astype(complex) \
        + 1e-3j * spec.hopping
    best = np.inf
    stagnant = 0
    step = np.inf
    for _ in range(_MAX_SWEEPS):
        d, dp, _, _, _ = _char_poly_scaled(z, spec, order=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.where(dp != 0, d / np.where(dp != 0, dp, 1.0), 0.0)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        if np.any(np.abs(diff) == 0.0):
            # coincident iterates repel by a deterministic nudge
            ii = np.where(np.abs(diff) == 0.0)
            z[ii[0][0]] += 1e-12 * scale
            continue
        s = np.sum(1.0 / diff, axis=1)
        denom = 1.0 - w * s
        corr = np.where(np.abs(denom) > 1e-300, w / denom, w)
        z = z - corr
        step = float(np.max(np.abs(corr)))
        if step < 1e-13 * scale:
            break
        if step < best * 0.9:
            best, stagnant = step, 0
        else:
            stagnant += 1
        if step < 1e-7 * scale and stagnant >= 12:
            break  # stalled on a (near-)multiple root; collapse handles it
        if step < 1e-4 * scale and stagnant >= 40:
            break  # orbiting a higher-order defective root at eps**(1/3)
    else:
        if step > 1e-6 * scale:
            raise ConvergenceError(
                f"eigenvalue iteration stalled at step {step:.3e} "
                f"after {_MAX_SWEEPS} sweeps for N={n}, m={spec.impurity_site}, "
                f"gamma={spec.gamma}")
    z, _ = _collapse_clusters(z, spec)
    z, n_real = _symmetrize(z, spec, tolerance)
    return Spectrum(eigenvalues=z, n_real=n_real, n_complex=n - n_real,
                    tolerance=tolerance)


def dense_eigenvalues(spec: ChainSpec, tolerance: float = 1e-8) -> Spectrum:
    """Brute-force route: LAPACK on the dense matrix, same canonicalization.

    Independent of the polynomial path; kept for cross-validation and
    the CLI oracle switch.
    """
    from .chain import build_hamiltonian

    z = np.linalg.eigvals(build_hamiltonian(spec))
    z, _ = _collapse_clusters(z, spec)
    z, n_real = _symmetrize(z, spec, tolerance)
    return Spectrum(eigenvalues=z, n_real=n_real,
                    n_complex=spec.n_sites - n_real, tolerance=tolerance)


def classify(spectrum: Spectrum) -> SpectrumClassification:
    """Counts, degree of PT-symmetry breaking, and largest |Im E|."""
    n = len(spectrum.eigenvalues)
    return SpectrumClassification(
        n_real=spectrum.n_real,
        n_complex=spectrum.n_complex,
        degree_of_breaking=spectrum.n_complex / n,
        max_imag=float(np.max(np.abs(spectrum.eigenvalues.imag))) if n else 0.0,
    )


def ground_state_energy(spectrum: Spectrum) -> complex:
    """Most negative real part; ties broken by most negative imaginary part."""
    z = spectrum.eigenvalues
    return complex(z[np.lexsort((z.imag, z.real))[0]])


def _recurrence_vector(diag: np.ndarray, off: complex, energy: complex):
    """Eigenvector from the three-term recurrence, seeded at the first site.

    Off-diagonals are nonzero, so the geometric multiplicity is one and
    psi_1 cannot vanish: the forward recurrence determines the whole
    vector. Neutral (oscillatory) for energies inside the band, which
    covers the exceptional points, where shift-invert cannot separate
    the eigenvector from its Jordan partner.
    """
    n = len(diag)
    psi = np.zeros(n, dtype=complex)
    psi[0] = 1.0
    if n > 1:
        psi[1] = -(diag[0] - energy) / off
    for i in range(1, n - 1):
        psi[i + 1] = (-(diag[i] - energy) * psi[i] - off * psi[i - 1]) / off
    psi = psi / np.max(np.abs(psi))
    hpsi = diag * psi
    hpsi[:-1] += off * psi[1:]
    hpsi[1:] += off * psi[:-1]
    return psi, float(np.linalg.norm(hpsi - energy * psi))


def eigenvector_for(spec: ChainSpec, energy: complex,
                    tolerance: float = 1e-9) -> Eigenvector:
    """Eigenvector for a given eigenvalue by tridiagonal inverse iteration.

    energy must be an eigenvalue: the result is residual-checked against
    tolerance*(2J+gamma) and rejected otherwise. Inside the
    exceptional-point window a degeneracy flag is set and the vector is
    taken from the three-term recurrence instead whenever that lowers
    the residual, since shift-invert mixes in the Jordan partner there.
    Normalization: max |psi_n| = 1 and the first amplitude above 1e-12
    is rotated real-positive. The plane-wave coefficients are
    least-squares fits of psi over the three regions with
    k = arccos(-E/(2J)); between the impurities the fit can be
    underdetermined (single interior site), where the minimum-norm
    solution is reported.
    """
    n = spec.n_sites
    m = spec.impurity_site
    mbar = spec.mirror_impurity
    j = spec.hopping
    scale = 2.0 * j + spec.gamma
    energy = complex(energy)

    # distance to the nearest other root of det(H - E), from D'/D''
    _, dp, dq, _, _ = _char_poly_scaled(np.array([energy]), spec, order=2)
    if dq[0] == 0:
        degenerate = dp[0] == 0
    else:
        degenerate = abs(2.0 * dp[0] / dq[0]) < _EP_WINDOW * 2.0 * j

    diag, off = hamiltonian_diagonals(spec)
    ab = np.zeros((3, n), dtype=complex)
    ab[0, 1:] = off
    ab[1, :] = diag - energy
    ab[2, :-1] = off
    rng = np.random.default_rng(1905)
    psi = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    psi /= np.linalg.norm(psi)
    shift = 0.0
    for _ in range(4):
        try:
            ab_s = ab.copy()
            ab_s[1, :] -= shift
            new = scipy.linalg.solve_banded((1, 1), ab_s, psi)
        except np.linalg.LinAlgError:
            shift = 1e-13 * scale  # exactly singular shift-invert, nudge off
            continue
        norm = np.linalg.norm(new)
        if not np.isfinite(norm) or norm == 0.0:
            shift = 1e-13 * scale
            continue
        psi = new / norm
    hpsi = diag * psi
    hpsi[:-1] += off * psi[1:]
    hpsi[1:] += off * psi[:-1]
    residual = float(np.linalg.norm(hpsi - energy * psi))
    if degenerate:
        alt, alt_residual = _recurrence_vector(diag, off, energy)
        if alt_residual < residual:
            psi, residual = alt, alt_residual
    if residual > tolerance * scale and not degenerate:
        raise ValueError(
            f"energy {energy:.6g} is not an eigenvalue to within "
            f"{tolerance:g}*(2J+gamma): residual {residual:.3e}")

    psi = psi / np.max(np.abs(psi))
    sig = np.where(np.abs(psi) > 1e-12)[0]
    if len(sig):
        psi = psi * np.exp(-1j * np.angle(psi[sig[0]]))

    k = np.emath.arccos(-energy / (2.0 * j))
    k = complex(k)
    sites = np.arange(1, n + 1)
    def _fit_one(basis, seg):
        denom = np.vdot(basis, basis)
        return complex(np.vdot(basis, seg) / denom) if abs(denom) > 0 else 0j
    a = _fit_one(np.sin(k * sites[:m]), psi[:m])
    b = _fit_one(np.sin(k * (n + 1 - sites[mbar - 1:])), psi[mbar - 1:])
    inner = sites[m:mbar - 1]
    if len(inner):
        design = np.column_stack([np.sin(k * inner), np.cos(k * inner)])
        sol, *_ = np.linalg.lstsq(design, psi[m:mbar - 1], rcond=None)
        p, q = complex(sol[0]), complex(sol[1])
    else:
        p, q = 0j, 0j
    return Eigenvector(energy=energy, amplitudes=psi, quasimomentum=k,
                       coeffs=RegionCoeffs(a=a, p=p, q=q, b=b),
                       residual=residual, degenerate=bool(degenerate))
