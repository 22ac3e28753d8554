"""Report figures for the command-line tools.

One figure builder per report: each takes the objects the CLI already
computed and returns a matplotlib Figure, so plots always show exactly
the numbers that went into the delimited output. Rendering is
headless (Agg) and save_figure writes any format matplotlib infers
from the file suffix.
"""
from __future__ import annotations

import numpy as np

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .chain import ChainSpec  # noqa: E402
from .secular import eval_secular  # noqa: E402
from .spectral import all_eigenvalues  # noqa: E402


def _title(spec: ChainSpec) -> str:
    return (f"N = {spec.n_sites}, m = {spec.impurity_site}, "
            f"gamma = {spec.gamma:g} J")


def spectrum_figure(spec: ChainSpec, eigenvalues: np.ndarray):
    """Eigenvalues in the complex energy plane, units of J."""
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    ev = np.asarray(eigenvalues) / spec.hopping
    real = np.abs(ev.imag) == 0.0
    ax.scatter(ev.real[real], ev.imag[real], s=28, color="tab:blue",
               label=f"real ({int(real.sum())})")
    if (~real).any():
        ax.scatter(ev.real[~real], ev.imag[~real], s=28, marker="D",
                   color="tab:red", label=f"complex ({int((~real).sum())})")
    ax.axhline(0.0, color="0.8", lw=0.8, zorder=0)
    ax.set_xlabel("Re E / J")
    ax.set_ylabel("Im E / J")
    ax.set_title("Spectrum, " + _title(spec))
    ax.legend(loc="best")
    fig.tight_layout()
    return fig


def roots_figure(spec: ChainSpec, k_values: np.ndarray):
    """Secular function over the band with the located roots marked."""
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    kk = np.linspace(1e-4, np.pi - 1e-4, 2001)
    ax.plot(kk / np.pi, eval_secular(kk, spec), lw=1.0, color="tab:blue",
            label="secular function")
    ax.plot(np.asarray(k_values) / np.pi,
            eval_secular(np.asarray(k_values), spec), "o", ms=6,
            color="tab:red", label=f"roots ({len(k_values)})")
    ax.axhline(0.0, color="0.8", lw=0.8, zorder=0)
    ax.set_xlabel("k / pi")
    ax.set_ylabel("M(k)")
    ax.set_title("Real quasimomenta, " + _title(spec))
    ax.legend(loc="best")
    fig.tight_layout()
    return fig


def roots_trajectories_figure(n_sites: int, impurity_site: int,
                              gamma_values, k_values, multiplicities):
    """Root trajectories k(gamma): pairs merge and leave the real axis."""
    g = np.asarray(gamma_values, dtype=float)
    k = np.asarray(k_values, dtype=float)
    mult = np.asarray(multiplicities)
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    simple = mult == 1
    ax.plot(g[simple], k[simple] / np.pi, ".", ms=3, color="tab:blue",
            label="simple root")
    if (~simple).any():
        ax.plot(g[~simple], k[~simple] / np.pi, "o", ms=5, mfc="none",
                color="tab:red", label="double root")
    ax.set_xlabel("gamma / J")
    ax.set_ylabel("k / pi")
    ax.set_title(f"Permitted quasimomenta, N = {n_sites}, m = {impurity_site}")
    ax.legend(loc="best")
    fig.tight_layout()
    return fig


def critical_figure(n_sites: int, impurity_site: int, gamma_pt: float,
                    hopping: float = 1.0):
    """Bifurcation of the leading imaginary part across the transition."""
    width = max(0.2 * gamma_pt, 0.05)
    gammas = np.linspace(max(gamma_pt - width, 0.0), gamma_pt + width, 41)
    tops = []
    for g in gammas:
        s = all_eigenvalues(ChainSpec(n_sites, impurity_site, g, hopping))
        tops.append(np.max(np.abs(s.eigenvalues.imag)) / hopping)
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    ax.plot(gammas, tops, "o-", ms=4, color="tab:blue")
    ax.axvline(gamma_pt, color="tab:red", ls="--", lw=1.0,
               label=f"gamma_PT = {gamma_pt:.6g} J")
    ax.set_xlabel("gamma / J")
    ax.set_ylabel("max |Im E| / J")
    ax.set_title(f"PT transition, N = {n_sites}, m = {impurity_site}")
    ax.legend(loc="upper left")
    fig.tight_layout()
    return fig


def sweep_figure(points):
    """Phase boundary and saturated broken count across impurity depth."""
    mu = [p.mu for p in points]
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6.0, 6.5), sharex=True)
    ax1.plot(mu, [p.gamma_pt for p in points], "o-", color="tab:blue")
    ax1.set_ylabel("gamma_PT / J")
    if points:
        ax1.set_title(f"Phase boundary, N = {points[0].n_sites}")
    ax2.plot(mu, [p.n_complex_saturated for p in points], "s-",
             color="tab:red")
    ax2.plot(mu, [2 * p.impurity_site for p in points], ":", color="0.5",
             label="2m")
    ax2.set_xlabel("mu = m / N")
    ax2.set_ylabel("saturated complex count")
    ax2.legend(loc="upper left")
    fig.tight_layout()
    return fig


def scaling_figure(fit):
    """Log-log fragility of the threshold with system size, plus the fit."""
    n = np.asarray(fit.sample_sizes, dtype=float)
    g = np.asarray(fit.gamma_values, dtype=float)
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    ax.loglog(n, g, "o", ms=7, color="tab:blue", label="gamma_PT(N)")
    line = np.exp(fit.exponent * np.log(n) + (np.log(g[0]) - fit.exponent * np.log(n[0])))
    ax.loglog(n, line, "--", color="tab:red",
              label=f"slope {fit.exponent:+.3f}")
    ax.set_xlabel("N")
    ax.set_ylabel("gamma_PT / J")
    ax.set_title(f"Threshold scaling at mu = {fit.mu:g}")
    ax.legend(loc="best")
    fig.tight_layout()
    return fig


def wavefunction_figure(spec: ChainSpec, profile, energy: complex):
    """Site-resolved modulus and phase of one eigenfunction."""
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6.5, 6.0), sharex=True)
    ax1.plot(profile.site, profile.amplitude, "o-", ms=4, color="tab:blue")
    for site in (spec.impurity_site, spec.mirror_impurity):
        ax1.axvline(site, color="0.75", ls=":", lw=1.0)
    ax1.set_ylabel("|psi_n|")
    ax1.set_title(_title(spec) + f", E = {energy / spec.hopping:.6g} J")
    ax2.plot(profile.site, profile.phase, "s-", ms=4, color="tab:red")
    ax2.set_xlabel("site n")
    ax2.set_ylabel("arg psi_n")
    fig.tight_layout()
    return fig


def save_figure(fig, path: str) -> None:
    fig.savefig(path, dpi=150)
    plt.close(fig)
