"""Command-line contract: formats, determinism, exit codes, oracle path."""
import json
import math
import re
import subprocess
import sys

import numpy as np
import pytest

import ptchain.cli
import ptchain.phase
from ptchain import ConvergenceError, GridResolutionError
from ptchain.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def parse_csv(text):
    lines = text.strip().split("\n")
    cols = lines[0].split(",")
    return cols, [dict(zip(cols, ln.split(","))) for ln in lines[1:]]


def test_spectrum_trivial_chain(capsys):
    code, out, _ = run_cli(capsys, "spectrum", "--n", "3", "--m", "1",
                           "--gamma", "0")
    assert code == 0
    cols, rows = parse_csv(out)
    assert cols == ["index", "re_E", "im_E", "is_real"]
    energies = [float(r["re_E"]) for r in rows]
    assert energies == pytest.approx([-math.sqrt(2), 0.0, math.sqrt(2)],
                                     abs=1e-10)
    assert all(r["is_real"] == "true" for r in rows)
    assert energies == sorted(energies)
    # 17 significant digits on irrational entries
    assert re.fullmatch(r"-1\.414213562373094\d", rows[0]["re_E"])


def test_spectrum_doubly_degenerate_at_transition(capsys):
    code, out, _ = run_cli(capsys, "spectrum", "--n", "20", "--m", "10",
                           "--gamma", "1.0")
    assert code == 0
    _, rows = parse_csv(out)
    vals = np.array([float(r["re_E"]) for r in rows])
    assert len(vals) == 20
    assert np.all(vals.reshape(10, 2)[:, 0] == vals.reshape(10, 2)[:, 1])


def test_spectrum_broken_counts(capsys):
    code, out, _ = run_cli(capsys, "spectrum", "--n", "8", "--m", "2",
                           "--gamma", "2.0")
    assert code == 0
    _, rows = parse_csv(out)
    flags = [r["is_real"] for r in rows]
    assert flags.count("false") == 4 and flags.count("true") == 4
    ims = [float(r["im_E"]) for r in rows if r["is_real"] == "false"]
    assert sorted(ims) == pytest.approx(sorted(-x for x in ims))


def test_json_csv_round_trip_identical_doubles(capsys):
    code, csv_text, _ = run_cli(capsys, "spectrum", "--n", "7", "--m", "2",
                                "--gamma", "1.3")
    assert code == 0
    code, json_text, _ = run_cli(capsys, "spectrum", "--n", "7", "--m", "2",
                                 "--gamma", "1.3", "--format", "json")
    assert code == 0
    payload = json.loads(json_text)
    assert payload["config"]["subcommand"] == "spectrum"
    assert payload["config"]["seed_oracle"] is False
    _, rows = parse_csv(csv_text)
    assert len(payload["records"]) == len(rows) == 7
    for jrec, crec in zip(payload["records"], rows):
        assert float(jrec["re_E"]) == float(crec["re_E"])
        assert float(jrec["im_E"]) == float(crec["im_E"])
        assert jrec["is_real"] == (crec["is_real"] == "true")


def test_determinism_and_out_file(tmp_path, capsys):
    f1, f2 = tmp_path / "a.csv", tmp_path / "b.csv"
    for f in (f1, f2):
        code = main(["spectrum", "--n", "11", "--m", "4", "--gamma", "0.9",
                     "--out", str(f)])
        assert code == 0
    capsys.readouterr()
    assert f1.read_bytes() == f2.read_bytes()
    code, out, _ = run_cli(capsys, "spectrum", "--n", "11", "--m", "4",
                           "--gamma", "0.9")
    assert code == 0
    assert out == f1.read_text(encoding="utf-8")


def test_hopping_emits_scaled_and_raw_columns(capsys):
    code, out, _ = run_cli(capsys, "spectrum", "--n", "4", "--m", "2",
                           "--gamma", "1.0", "--hopping", "2.0")
    assert code == 0
    cols, rows = parse_csv(out)
    assert cols[-2:] == ["re_E_raw", "im_E_raw"]
    for r in rows:
        assert float(r["re_E_raw"]) == pytest.approx(2 * float(r["re_E"]),
                                                     abs=1e-12)


def test_roots_hermitian_grid_row(capsys):
    code, out, _ = run_cli(capsys, "roots", "--n", "20", "--m", "4",
                           "--gamma", "0")
    assert code == 0
    cols, rows = parse_csv(out)
    assert cols == ["gamma", "k_over_pi", "multiplicity"]
    ks = np.array([float(r["k_over_pi"]) for r in rows])
    assert np.allclose(ks, np.arange(1, 21) / 21, atol=1e-10)
    assert all(r["multiplicity"] == "1" for r in rows)


def test_roots_grid_counts_drop_past_merge(capsys):
    code, out, _ = run_cli(capsys, "roots", "--n", "8", "--m", "2",
                           "--gamma-min", "0", "--gamma-max", "1.0",
                           "--gamma-steps", "11")
    assert code == 0
    _, rows = parse_csv(out)
    counts = {}
    for r in rows:
        g = float(r["gamma"])
        counts[g] = counts.get(g, 0) + int(r["multiplicity"])
    gammas = sorted(counts)
    assert len(gammas) == 11
    assert counts[gammas[0]] == 8
    assert counts[gammas[-1]] < 8


def test_critical_subcommand_matches_library(capsys):
    code, out, _ = run_cli(capsys, "critical", "--n", "20", "--m", "10")
    assert code == 0
    _, rows = parse_csv(out)
    assert len(rows) == 1
    assert float(rows[0]["gamma_pt"]) == pytest.approx(1.0, abs=1e-6)
    assert rows[0]["n_complex_just_above"] == "20"


def test_sweep_subcommand_all_and_single_position(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--n", "8")
    assert code == 0
    cols, rows = parse_csv(out)
    assert cols == ["N", "m", "mu", "gamma_pt", "n_complex_saturated"]
    assert [r["m"] for r in rows] == ["1", "2", "3", "4"]
    code, out, _ = run_cli(capsys, "sweep", "--n", "8", "--m", "4")
    assert code == 0
    _, rows = parse_csv(out)
    assert len(rows) == 1
    assert float(rows[0]["gamma_pt"]) == pytest.approx(1.0, abs=1e-6)


def test_scaling_subcommand_doubles_sizes(capsys):
    code, out, _ = run_cli(capsys, "scaling", "--n", "4", "--m", "2")
    assert code == 0
    cols, rows = parse_csv(out)
    assert cols == ["N", "gamma_pt", "exponent", "residual"]
    assert [r["N"] for r in rows] == ["4", "8", "16", "32"]
    assert abs(float(rows[0]["exponent"])) < 1e-4


def test_wavefunction_ground_equals_index_zero(capsys):
    base = ["wavefunction", "--n", "12", "--m", "6", "--gamma", "0.5"]
    code, out_g, _ = run_cli(capsys, *base, "--state", "ground")
    assert code == 0
    code, out_0, _ = run_cli(capsys, *base, "--state", "0")
    assert code == 0
    assert out_g == out_0
    cols, rows = parse_csv(out_g)
    assert cols == ["site", "amplitude", "phase_over_pi"]
    assert len(rows) == 12
    amps = [float(r["amplitude"]) for r in rows]
    assert max(amps) == pytest.approx(1.0)


def test_wavefunction_state_validation(capsys):
    base = ["wavefunction", "--n", "6", "--m", "2", "--gamma", "0.4"]
    code, _, err = run_cli(capsys, *base, "--state", "17")
    assert code == 1 and "outside" in err
    code, _, err = run_cli(capsys, *base, "--state", "lowest")
    assert code == 1 and "state" in err


def test_domain_error_exits_one(capsys):
    code, _, err = run_cli(capsys, "spectrum", "--n", "8", "--m", "7",
                           "--gamma", "0.5")
    assert code == 1
    assert "ptchain:" in err


def test_usage_error_exits_one(capsys):
    assert main(["spectrum", "--n", "8"]) == 1  # missing required flags
    capsys.readouterr()
    assert main(["nonsense"]) == 1
    capsys.readouterr()
    assert main(["--help"]) == 0
    capsys.readouterr()


def test_nonconvergence_exits_two(monkeypatch, capsys):
    def boom(spec, tolerance=1e-8):
        raise ConvergenceError("synthetic stall")

    monkeypatch.setattr(ptchain.cli, "all_eigenvalues", boom)
    code, _, err = run_cli(capsys, "spectrum", "--n", "8", "--m", "2",
                           "--gamma", "0.5")
    assert code == 2 and "synthetic stall" in err


def test_grid_failure_exits_two(monkeypatch, capsys):
    def boom(*a, **kw):
        raise GridResolutionError("synthetic grid failure")

    monkeypatch.setattr(ptchain.phase, "find_real_roots", boom)
    code, _, err = run_cli(capsys, "critical", "--n", "8", "--m", "2")
    assert code == 2 and "grid failure" in err


def test_seed_oracle_matches_default_route(capsys):
    base = ["spectrum", "--n", "10", "--m", "3", "--gamma", "1.7"]
    code, out_a, _ = run_cli(capsys, *base)
    assert code == 0
    code, out_b, _ = run_cli(capsys, *base, "--seed-oracle")
    assert code == 0
    _, ra = parse_csv(out_a)
    _, rb = parse_csv(out_b)
    for x, y in zip(ra, rb):
        assert float(x["re_E"]) == pytest.approx(float(y["re_E"]), abs=1e-8)
        assert float(x["im_E"]) == pytest.approx(float(y["im_E"]), abs=1e-8)
        assert x["is_real"] == y["is_real"]


def test_seed_oracle_roots_and_critical_agree(capsys):
    code, out_a, _ = run_cli(capsys, "roots", "--n", "9", "--m", "2",
                             "--gamma", "0.4")
    code_b, out_b, _ = run_cli(capsys, "roots", "--n", "9", "--m", "2",
                               "--gamma", "0.4", "--seed-oracle")
    assert code == code_b == 0
    _, ra = parse_csv(out_a)
    _, rb = parse_csv(out_b)
    assert len(ra) == len(rb)
    for x, y in zip(ra, rb):
        assert float(x["k_over_pi"]) == pytest.approx(float(y["k_over_pi"]),
                                                      abs=1e-8)
        assert x["multiplicity"] == y["multiplicity"]
    code, out, _ = run_cli(capsys, "critical", "--n", "8", "--m", "4",
                           "--seed-oracle")
    assert code == 0
    _, rows = parse_csv(out)
    assert float(rows[0]["gamma_pt"]) == pytest.approx(1.0, abs=1e-6)


def test_seed_oracle_size_cap(capsys):
    code, _, err = run_cli(capsys, "spectrum", "--n", "65", "--m", "2",
                           "--gamma", "0.5", "--seed-oracle")
    assert code == 1 and "64" in err


def test_plot_writes_figure_files(tmp_path, capsys):
    jobs = [
        (["spectrum", "--n", "8", "--m", "2", "--gamma", "1.5"], "s.png"),
        (["roots", "--n", "8", "--m", "2", "--gamma", "0.3"], "r.png"),
        (["roots", "--n", "8", "--m", "2", "--gamma-steps", "5"], "t.png"),
        (["critical", "--n", "8", "--m", "4"], "c.png"),
        (["sweep", "--n", "6"], "w.png"),
        (["scaling", "--n", "4", "--m", "2"], "f.png"),
        (["wavefunction", "--n", "8", "--m", "4", "--gamma", "0.5"], "v.png"),
    ]
    for argv, name in jobs:
        target = tmp_path / name
        assert main(argv + ["--plot", str(target),
                            "--out", str(tmp_path / "d.csv")]) == 0
        assert target.exists() and target.stat().st_size > 0
    capsys.readouterr()


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "ptchain.cli", "spectrum", "--n", "3",
         "--m", "1", "--gamma", "0"],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("index,re_E,im_E,is_real\n")
