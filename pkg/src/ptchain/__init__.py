"""Spectral phase diagram of a PT-symmetric tight-binding chain.

An open chain of N sites with hopping J carries a balanced pair of
imaginary impurities +i gamma and -i gamma at mirror sites m and
N+1-m. The package locates the real spectrum through a Bethe-ansatz
secular equation, the full complex spectrum through the characteristic
polynomial of the tridiagonal Hamiltonian, and the PT transition
gamma_PT(N, m) by certified bisection, together with the eigenfunction
amplitude/phase structure on both sides of the transition.
"""
from .chain import (ChainSpec, analytic_spectrum_hermitian,
                    build_hamiltonian, hamiltonian_diagonals, mirror_site)
from .secular import (GridResolutionError, RootSet, eval_secular,
                      eval_secular_nearest, eval_secular_next_nearest,
                      find_real_roots)
from .spectral import (ConvergenceError, Eigenvector, RegionCoeffs, Spectrum,
                       SpectrumClassification, all_eigenvalues,
                       char_poly_eval, classify, dense_eigenvalues,
                       eigenvector_for, ground_state_energy)
from .phase import (CriticalResult, PhasePoint, ScalingFit,
                    approx_real_root_count, broken_count, critical_gamma,
                    fit_fragility_scaling, odd_closest_threshold,
                    saturation_gamma, sweep_phase_diagram)
from .wavefn import (AmplitudePhaseProfile, amplitude_phase,
                     pt_symmetry_check, theta_gamma)

__version__ = "0.1.0"

__all__ = [
    "ChainSpec", "mirror_site", "hamiltonian_diagonals", "build_hamiltonian",
    "analytic_spectrum_hermitian",
    "GridResolutionError", "RootSet", "eval_secular", "eval_secular_nearest",
    "eval_secular_next_nearest", "find_real_roots",
    "ConvergenceError", "Spectrum", "SpectrumClassification", "RegionCoeffs",
    "Eigenvector", "char_poly_eval", "all_eigenvalues", "dense_eigenvalues",
    "classify", "ground_state_energy", "eigenvector_for",
    "CriticalResult", "PhasePoint", "ScalingFit", "critical_gamma",
    "broken_count", "odd_closest_threshold", "approx_real_root_count",
    "saturation_gamma", "sweep_phase_diagram", "fit_fragility_scaling",
    "AmplitudePhaseProfile", "amplitude_phase", "theta_gamma",
    "pt_symmetry_check",
    "__version__",
]
