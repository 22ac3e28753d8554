"""Tight-binding chain with a balanced pair of imaginary impurities.

The model is an N-site open chain with uniform hopping J and two purely
imaginary on-site potentials +i*gamma and -i*gamma placed at the mirror
sites m and mbar = N + 1 - m (sites are numbered 1..N):

    H = -J * sum_n (|n><n+1| + |n+1><n|) + i*gamma*(|m><m| - |mbar><mbar|)

H is not Hermitian, but it commutes with the combined parity (n -> N+1-n)
and time-reversal (complex conjugation) operation, so its spectrum is
either entirely real or comes in complex-conjugate pairs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ChainSpec:
    """Chain geometry and couplings. Sites are 1-based.

    n_sites: chain length N >= 2
    impurity_site: gain site m with 1 <= m <= N // 2
    gamma: impurity strength gamma >= 0 (energy units)
    hopping: hopping energy J > 0
    """

    n_sites: int
    impurity_site: int
    gamma: float
    hopping: float = 1.0

    def __post_init__(self) -> None:
        n, m = self.n_sites, self.impurity_site
        if not isinstance(n, int) or n < 2:
            raise ValueError(f"n_sites must be an integer >= 2, got {n!r}")
        if not isinstance(m, int) or not 1 <= m <= n // 2:
            raise ValueError(
                f"impurity_site must satisfy 1 <= m <= N//2 = {n // 2}, got {m!r}")
        if not self.gamma >= 0.0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma!r}")
        if not self.hopping > 0.0:
            raise ValueError(f"hopping must be > 0, got {self.hopping!r}")

    @property
    def mirror_impurity(self) -> int:
        """Site mbar = N + 1 - m carrying the -i*gamma (loss) potential."""
        return self.n_sites + 1 - self.impurity_site

    @property
    def mu(self) -> float:
        """Relative impurity position mu = m/N <= 0.5."""
        return self.impurity_site / self.n_sites

    @property
    def reduced_gamma(self) -> float:
        """gamma in units of the hopping, gamma/J."""
        return self.gamma / self.hopping


def mirror_site(n: int, n_sites: int) -> int:
    """Parity partner nbar = N + 1 - n of site n (1-based)."""
    if not 1 <= n <= n_sites:
        raise ValueError(f"site must be in 1..{n_sites}, got {n}")
    return n_sites + 1 - n


def hamiltonian_diagonals(spec: ChainSpec) -> tuple[np.ndarray, float]:
    """Diagonal of H (complex, length N) and the off-diagonal entry -J."""
    diag = np.zeros(spec.n_sites, dtype=complex)
    diag[spec.impurity_site - 1] = 1j * spec.gamma
    diag[spec.mirror_impurity - 1] = -1j * spec.gamma
    return diag, -spec.hopping


def build_hamiltonian(spec: ChainSpec) -> np.ndarray:
    """Dense N x N Hamiltonian matrix.

    Tridiagonal: -J on both off-diagonals, zero diagonal except +i*gamma
    at site m and -i*gamma at site N+1-m. Used as the brute-force oracle
    and for small-N work; the production spectral path never forms it.
    """
    n = spec.n_sites
    diag, off = hamiltonian_diagonals(spec)
    h = np.zeros((n, n), dtype=complex)
    idx = np.arange(n - 1)
    h[idx, idx + 1] = off
    h[idx + 1, idx] = off
    h[np.arange(n), np.arange(n)] = diag
    return h


def analytic_spectrum_hermitian(n_sites: int, hopping: float = 1.0) -> np.ndarray:
    """Eigenvalues -2J cos(alpha*pi/(N+1)), alpha = 1..N, of the gamma = 0 chain.

    Returned in ascending order; all lie strictly inside the band (-2J, 2J).
    """
    if n_sites < 1:
        raise ValueError(f"n_sites must be >= 1, got {n_sites}")
    if not hopping > 0.0:
        raise ValueError(f"hopping must be > 0, got {hopping!r}")
    alpha = np.arange(1, n_sites + 1)
    return -2.0 * hopping * np.cos(alpha * math.pi / (n_sites + 1))
