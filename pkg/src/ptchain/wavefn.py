"""Amplitude and phase structure of the chain eigenfunctions.

In the PT-symmetric phase every eigenfunction can be gauged so that
|psi_n| = |psi_(N+1-n)|: the modulus is mirror symmetric about the
chain center and only the phase carries the impurity. For the
nearest-impurity chain (even N, m = N/2) the two halves are plane
waves that differ by a single relative phase theta_gamma with

    tan(theta_gamma) = gamma sin(kN/2) / (J sin(k(N/2+1))),

which on the lowest band state grows from 0 at gamma = 0 (through
pi/6 at gamma = J/2, i.e. arcsin(gamma/J)) to pi/2 at the transition
gamma = J. Past the transition the modulus symmetry is lost: the
state piles up on the amplifying impurity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectral import Eigenvector


@dataclass(frozen=True)
class AmplitudePhaseProfile:
    """Polar form of one eigenfunction, gauge-fixed on the first site."""

    site: np.ndarray
    amplitude: np.ndarray
    phase: np.ndarray


def amplitude_phase(eigenvector) -> AmplitudePhaseProfile:
    """Split an eigenfunction into site-resolved modulus and phase.

    Accepts an Eigenvector or a bare amplitude array. The global gauge
    puts the first site of non-negligible modulus on the positive real
    axis, so its phase is exactly 0. Phases land in (-pi, pi]; sites
    with zero modulus report phase 0.
    """
    amps = eigenvector.amplitudes if isinstance(eigenvector, Eigenvector) \
        else np.asarray(eigenvector, dtype=complex)
    if amps.ndim != 1 or amps.size == 0:
        raise ValueError("expected a nonempty 1-d amplitude array")
    amplitude = np.abs(amps)
    scale = float(np.max(amplitude))
    significant = amplitude > 1e-12 * max(scale, 1.0)
    anchor = np.flatnonzero(significant)
    phase = np.zeros(amps.size)
    if anchor.size:
        # subtract angles rather than rotate: the gauge site stays 0.0
        raw = np.angle(amps) - float(np.angle(amps[anchor[0]]))
        raw = np.where(raw > np.pi, raw - 2.0 * np.pi, raw)
        raw = np.where(raw <= -np.pi, raw + 2.0 * np.pi, raw)
        phase = np.where(significant, raw, 0.0)
    return AmplitudePhaseProfile(site=np.arange(1, amps.size + 1),
                                 amplitude=amplitude, phase=phase)


def theta_gamma(k: float, n_sites: int, gamma: float, hopping: float = 1.0) -> float:
    """Relative phase between the two halves of a nearest-impurity state.

    Defined for even N with impurities at N/2 and N/2 + 1. Returns the
    angle in [0, pi). Undefined (ValueError) when both sin(kN/2) and
    sin(k(N/2+1)) vanish, i.e. off the secular-root set.
    """
    if n_sites % 2 != 0 or n_sites < 2:
        raise ValueError(f"even N >= 2 required, got {n_sites}")
    if hopping <= 0:
        raise ValueError(f"hopping must be > 0, got {hopping}")
    half = n_sites // 2
    num = gamma * math.sin(k * half)
    den = hopping * math.sin(k * (half + 1))
    if abs(num) < 1e-14 and abs(den) < 1e-14:
        raise ValueError(
            f"phase undefined at k = {k}: both half-chain amplitudes vanish")
    theta = math.atan2(num, den)
    if theta < 0.0:
        theta += math.pi
    if theta >= math.pi:  # atan2(-0.0, -1.0) folds to the branch end
        theta = 0.0
    return theta


def pt_symmetry_check(eigenvector, tolerance: float = 1e-8) -> bool:
    """Whether the modulus profile is mirror symmetric about the center.

    True in the PT-symmetric phase, False for the broken states, which
    localize on one impurity. Comparison is relative to the peak
    modulus.
    """
    amps = eigenvector.amplitudes if isinstance(eigenvector, Eigenvector) \
        else np.asarray(eigenvector, dtype=complex)
    mods = np.abs(amps)
    scale = float(np.max(mods))
    if scale == 0.0:
        return True
    return bool(np.max(np.abs(mods - mods[::-1])) <= tolerance * scale)
