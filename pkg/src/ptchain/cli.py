"""Command-line front end for the impurity-chain spectral tools.

Six subcommands map one-to-one onto the library surface:

  spectrum      full eigenvalue list of one chain
  roots         real quasimomenta across an impurity-strength grid
  critical      certified PT threshold for one impurity position
  sweep         threshold and saturated broken count across positions
  scaling       log-log fit of the threshold against chain length
  wavefunction  site-resolved modulus and phase of one eigenstate

Records are written as CSV (default) or JSON with 17 significant
digits, so identical configurations produce byte-identical artifacts
and the two formats parse back to the same doubles. Energies and
strengths are reported in units of the hopping J; raw values are
appended when --hopping differs from 1. --plot PATH renders the
matching figure alongside the delimited output. Exit status: 0 on
success, 1 on domain or usage errors, 2 on numerical non-convergence.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass

import numpy as np

from .chain import ChainSpec, build_hamiltonian
from .phase import (critical_gamma, fit_fragility_scaling,
                    sweep_phase_diagram)
from .secular import GridResolutionError, find_real_roots
from .spectral import (ConvergenceError, all_eigenvalues, dense_eigenvalues,
                       eigenvector_for)
from .wavefn import amplitude_phase
from . import plotting

log = logging.getLogger(__name__)

_ORACLE_MAX_N = 64


@dataclass(frozen=True)
class RunConfig:
    """One CLI invocation, resolved to plain values."""

    subcommand: str
    n_sites: int | None = None
    impurity_site: int | None = None
    gamma: float | None = None
    hopping: float = 1.0
    gamma_min: float | None = None
    gamma_max: float | None = None
    gamma_steps: int | None = None
    tolerance: float | None = None
    state: str | None = None
    output_format: str = "csv"
    output_path: str | None = None
    seed_oracle: bool = False
    plot_path: str | None = None


def _fmt_float(x) -> str:
    return "%.17g" % float(x)


def _fmt_cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return _fmt_float(v)
    return str(v)


def _write_csv(out, columns, records) -> None:
    out.write(",".join(columns) + "\n")
    for rec in records:
        out.write(",".join(_fmt_cell(rec[c]) for c in columns) + "\n")


def _write_json_value(out, value, indent: int) -> None:
    pad = "  " * indent
    if isinstance(value, dict):
        if not value:
            out.write("{}")
            return
        out.write("{\n")
        for i, (key, val) in enumerate(value.items()):
            out.write(pad + "  " + json.dumps(key) + ": ")
            _write_json_value(out, val, indent + 1)
            out.write(",\n" if i < len(value) - 1 else "\n")
        out.write(pad + "}")
    elif isinstance(value, (list, tuple)):
        if not len(value):
            out.write("[]")
            return
        out.write("[\n")
        for i, val in enumerate(value):
            out.write(pad + "  ")
            _write_json_value(out, val, indent + 1)
            out.write(",\n" if i < len(value) - 1 else "\n")
        out.write(pad + "]")
    elif isinstance(value, (bool, np.bool_)):
        out.write("true" if value else "false")
    elif value is None:
        out.write("null")
    elif isinstance(value, (int, np.integer)):
        out.write(str(int(value)))
    elif isinstance(value, (float, np.floating)):
        out.write(_fmt_float(value))
    else:
        out.write(json.dumps(str(value)))


def _config_dict(cfg: RunConfig) -> dict:
    d = {"subcommand": cfg.subcommand}
    for key, val in (("n", cfg.n_sites), ("m", cfg.impurity_site),
                     ("gamma", cfg.gamma), ("hopping", cfg.hopping),
                     ("gamma_min", cfg.gamma_min), ("gamma_max", cfg.gamma_max),
                     ("gamma_steps", cfg.gamma_steps), ("state", cfg.state),
                     ("tol", cfg.tolerance)):
        if val is not None:
            d[key] = val
    d["format"] = cfg.output_format
    d["seed_oracle"] = cfg.seed_oracle
    return d


def _check_oracle_size(n_sites: int) -> None:
    if n_sites > _ORACLE_MAX_N:
        raise ValueError(
            f"--seed-oracle runs the dense eigensolver and is limited to "
            f"N <= {_ORACLE_MAX_N}, got N = {n_sites}")


def _spectrum_of(cfg: RunConfig, spec: ChainSpec):
    tol = cfg.tolerance if cfg.tolerance is not None else 1e-8
    if cfg.seed_oracle:
        _check_oracle_size(spec.n_sites)
        return dense_eigenvalues(spec, tol)
    return all_eigenvalues(spec, tol)


def _cmd_spectrum(cfg: RunConfig):
    spec = ChainSpec(cfg.n_sites, cfg.impurity_site, cfg.gamma, cfg.hopping)
    s = _spectrum_of(cfg, spec)
    scaled = s.eigenvalues / spec.hopping
    columns = ["index", "re_E", "im_E", "is_real"]
    if spec.hopping != 1.0:
        columns += ["re_E_raw", "im_E_raw"]
    records = []
    for i, (z, zs) in enumerate(zip(s.eigenvalues, scaled)):
        rec = {"index": i, "re_E": zs.real, "im_E": zs.imag,
               "is_real": z.imag == 0.0}
        if spec.hopping != 1.0:
            rec.update(re_E_raw=z.real, im_E_raw=z.imag)
        records.append(rec)
    figure = lambda: plotting.spectrum_figure(spec, s.eigenvalues)
    return columns, records, figure


def _roots_at(cfg: RunConfig, gamma: float):
    """(k, multiplicity) arrays at one strength, secular or dense route."""
    spec = ChainSpec(cfg.n_sites, cfg.impurity_site, gamma, cfg.hopping)
    if cfg.seed_oracle:
        s = dense_eigenvalues(spec, cfg.tolerance if cfg.tolerance is not None
                              else 1e-8)
        real = np.sort(s.eigenvalues.real[s.eigenvalues.imag == 0.0])
        k_all = np.arccos(np.clip(-real / (2.0 * spec.hopping), -1.0, 1.0))
        ks, mult = [], []
        for val in k_all:
            if ks and abs(val - ks[-1]) <= 1e-9:
                mult[-1] += 1
            else:
                ks.append(float(val))
                mult.append(1)
        return np.asarray(ks), np.asarray(mult)
    rs = find_real_roots(spec, tolerance=cfg.tolerance)
    return rs.k_values, rs.multiplicities


def _cmd_roots(cfg: RunConfig):
    if cfg.seed_oracle:
        _check_oracle_size(cfg.n_sites)
    if cfg.gamma is not None:
        gammas = np.asarray([cfg.gamma])
    else:
        gammas = np.linspace(cfg.gamma_min, cfg.gamma_max, cfg.gamma_steps)
    columns = ["gamma", "k_over_pi", "multiplicity"]
    if cfg.hopping != 1.0:
        columns += ["gamma_raw"]
    records = []
    for g in gammas:
        try:
            ks, mult = _roots_at(cfg, float(g))
        except (GridResolutionError, ConvergenceError) as err:
            log.warning("roots at gamma=%g skipped: %s", g, err)
            continue
        for k, mm in zip(ks, mult):
            rec = {"gamma": g / cfg.hopping, "k_over_pi": k / np.pi,
                   "multiplicity": int(mm)}
            if cfg.hopping != 1.0:
                rec["gamma_raw"] = float(g)
            records.append(rec)

    def figure():
        if len(gammas) == 1:
            spec = ChainSpec(cfg.n_sites, cfg.impurity_site, float(gammas[0]),
                             cfg.hopping)
            k = np.asarray([r["k_over_pi"] for r in records]) * np.pi
            return plotting.roots_figure(spec, k)
        return plotting.roots_trajectories_figure(
            cfg.n_sites, cfg.impurity_site,
            [r["gamma"] for r in records],
            [r["k_over_pi"] * np.pi for r in records],
            [r["multiplicity"] for r in records])

    return columns, records, figure


def _cmd_critical(cfg: RunConfig):
    if cfg.seed_oracle:
        _check_oracle_size(cfg.n_sites)
    res = critical_gamma(cfg.n_sites, cfg.impurity_site,
                         tolerance=cfg.tolerance if cfg.tolerance is not None
                         else 1e-8,
                         gamma_cap=cfg.gamma_max, use_dense=cfg.seed_oracle)
    columns = ["n_sites", "impurity_site", "gamma_pt", "gamma_low",
               "gamma_high", "tolerance", "n_complex_just_above"]
    records = [{"n_sites": res.n_sites, "impurity_site": res.impurity_site,
                "gamma_pt": res.gamma_pt, "gamma_low": res.gamma_low,
                "gamma_high": res.gamma_high, "tolerance": res.tolerance,
                "n_complex_just_above": res.n_complex_just_above}]
    figure = lambda: plotting.critical_figure(cfg.n_sites, cfg.impurity_site,
                                              res.gamma_pt)
    return columns, records, figure


def _cmd_sweep(cfg: RunConfig):
    if cfg.seed_oracle:
        _check_oracle_size(cfg.n_sites)
    m_values = None if cfg.impurity_site is None else [cfg.impurity_site]
    points = sweep_phase_diagram(cfg.n_sites, m_values,
                                 tolerance=cfg.tolerance if cfg.tolerance
                                 is not None else 1e-8,
                                 use_dense=cfg.seed_oracle)
    columns = ["N", "m", "mu", "gamma_pt", "n_complex_saturated"]
    records = [{"N": p.n_sites, "m": p.impurity_site, "mu": p.mu,
                "gamma_pt": p.gamma_pt,
                "n_complex_saturated": p.n_complex_saturated}
               for p in points]
    figure = lambda: plotting.sweep_figure(points)
    return columns, records, figure


def _cmd_scaling(cfg: RunConfig):
    sizes = [cfg.n_sites, 2 * cfg.n_sites, 4 * cfg.n_sites, 8 * cfg.n_sites]
    if cfg.seed_oracle:
        _check_oracle_size(max(sizes))
    fit = fit_fragility_scaling(cfg.impurity_site / cfg.n_sites, sizes,
                                tolerance=cfg.tolerance if cfg.tolerance
                                is not None else 1e-8,
                                use_dense=cfg.seed_oracle)
    columns = ["N", "gamma_pt", "exponent", "residual"]
    records = [{"N": n, "gamma_pt": g, "exponent": fit.exponent,
                "residual": fit.residual}
               for n, g in zip(fit.sample_sizes, fit.gamma_values)]
    figure = lambda: plotting.scaling_figure(fit)
    return columns, records, figure


def _state_index(state: str, n_sites: int) -> int:
    if state == "ground":
        return 0
    try:
        idx = int(state)
    except ValueError:
        raise ValueError(
            f"--state must be 'ground' or an eigenvalue index, got {state!r}")
    if not 0 <= idx < n_sites:
        raise ValueError(f"--state index {idx} outside 0..{n_sites - 1}")
    return idx


def _cmd_wavefunction(cfg: RunConfig):
    spec = ChainSpec(cfg.n_sites, cfg.impurity_site, cfg.gamma, cfg.hopping)
    s = _spectrum_of(cfg, spec)
    energy = s.eigenvalues[_state_index(cfg.state, cfg.n_sites)]
    if cfg.seed_oracle:
        w, v = np.linalg.eig(build_hamiltonian(spec))
        amps = v[:, int(np.argmin(np.abs(w - energy)))]
        amps = amps / np.max(np.abs(amps))
    else:
        tol = cfg.tolerance if cfg.tolerance is not None else 1e-9
        amps = eigenvector_for(spec, energy, tolerance=tol).amplitudes
    profile = amplitude_phase(amps)
    columns = ["site", "amplitude", "phase_over_pi"]
    records = [{"site": int(n), "amplitude": a, "phase_over_pi": p / np.pi}
               for n, a, p in zip(profile.site, profile.amplitude,
                                  profile.phase)]
    figure = lambda: plotting.wavefunction_figure(spec, profile, energy)
    return columns, records, figure


_BUILDERS = {"spectrum": _cmd_spectrum, "roots": _cmd_roots,
             "critical": _cmd_critical, "sweep": _cmd_sweep,
             "scaling": _cmd_scaling, "wavefunction": _cmd_wavefunction}


def run(cfg: RunConfig) -> int:
    columns, records, figure = _BUILDERS[cfg.subcommand](cfg)
    if cfg.output_path is None:
        _render(sys.stdout, cfg, columns, records)
    else:
        with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
            _render(fh, cfg, columns, records)
    if cfg.plot_path is not None:
        plotting.save_figure(figure(), cfg.plot_path)
    return 0


def _render(out, cfg: RunConfig, columns, records) -> None:
    if cfg.output_format == "json":
        payload = {"config": _config_dict(cfg),
                   "records": [{c: r[c] for c in columns} for r in records]}
        _write_json_value(out, payload, 0)
        out.write("\n")
    else:
        _write_csv(out, columns, records)


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="ptchain",
        description="Spectral phase diagram of a PT-symmetric chain with a "
                    "balanced gain/loss impurity pair.")
    sub = top.add_subparsers(dest="subcommand", required=True)

    io = argparse.ArgumentParser(add_help=False)
    io.add_argument("--format", choices=["csv", "json"], default="csv",
                    help="output format (default csv)")
    io.add_argument("--out", default=None, metavar="PATH",
                    help="output file (default standard output)")
    io.add_argument("--plot", default=None, metavar="PATH",
                    help="also render the matching figure to PATH")
    io.add_argument("--tol", type=float, default=None,
                    help="tolerance override (default per operation)")
    io.add_argument("--seed-oracle", action="store_true",
                    help=argparse.SUPPRESS)

    chain = argparse.ArgumentParser(add_help=False)
    chain.add_argument("--n", type=int, required=True, help="chain length N")
    chain.add_argument("--m", type=int, required=True,
                       help="impurity site m, 1 <= m <= N/2")

    p = sub.add_parser("spectrum", parents=[chain, io],
                       help="full eigenvalue list of one chain")
    p.add_argument("--gamma", type=float, required=True,
                   help="impurity strength")
    p.add_argument("--hopping", type=float, default=1.0,
                   help="hopping J (default 1); output stays in units of J")

    p = sub.add_parser("roots", parents=[chain, io],
                       help="real quasimomenta across a strength grid")
    p.add_argument("--gamma", type=float, default=None,
                   help="single strength instead of the grid")
    p.add_argument("--gamma-min", type=float, default=0.0,
                   help="grid start (default 0)")
    p.add_argument("--gamma-max", type=float, default=2.0,
                   help="grid end (default 2)")
    p.add_argument("--gamma-steps", type=int, default=41,
                   help="grid points (default 41)")
    p.add_argument("--hopping", type=float, default=1.0,
                   help="hopping J (default 1); output stays in units of J")

    p = sub.add_parser("critical", parents=[chain, io],
                       help="certified PT threshold for one position")
    p.add_argument("--gamma-max", type=float, default=2.0,
                   help="bisection cap in units of J (default 2)")

    p = sub.add_parser("sweep", parents=[io],
                       help="threshold across impurity positions")
    p.add_argument("--n", type=int, required=True, help="chain length N")
    p.add_argument("--m", type=int, default=None,
                   help="restrict to one impurity site (default all)")

    p = sub.add_parser("scaling", parents=[chain, io],
                       help="threshold scaling over sizes N, 2N, 4N, 8N")

    p = sub.add_parser("wavefunction", parents=[chain, io],
                       help="modulus and phase of one eigenstate")
    p.add_argument("--gamma", type=float, required=True,
                   help="impurity strength")
    p.add_argument("--hopping", type=float, default=1.0,
                   help="hopping J (default 1)")
    p.add_argument("--state", default="ground",
                   help="'ground' or 0-based index in (Re, Im) order")
    return top


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    get = lambda name: getattr(args, name, None)
    return RunConfig(subcommand=args.subcommand, n_sites=get("n"),
                     impurity_site=get("m"), gamma=get("gamma"),
                     hopping=get("hopping") if get("hopping") is not None
                     else 1.0,
                     gamma_min=get("gamma_min"), gamma_max=get("gamma_max"),
                     gamma_steps=get("gamma_steps"), tolerance=get("tol"),
                     state=get("state"), output_format=args.format,
                     output_path=get("out"), seed_oracle=bool(args.seed_oracle),
                     plot_path=get("plot"))


def main(argv=None) -> int:
    logging.basicConfig(format="%(levelname)s %(name)s: %(message)s")
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return run(_config_from_args(args))
    except (ConvergenceError, GridResolutionError) as err:
        print(f"ptchain: {err}", file=sys.stderr)
        return 2
    except ValueError as err:
        print(f"ptchain: {err}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
