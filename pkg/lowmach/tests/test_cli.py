"""Tests for the command line interface."""

import os
import runpy
import sys
import warnings

import pandas as pd
import pytest

from lowmach.cli import EXIT_ACCEPTANCE, EXIT_ERROR, EXIT_OK, build_parser, main

TINY = (
    "grid.nx = 16\n"
    "grid.lx = 1.0\n"
    "time.t_end = 0.02\n"
    "time.sample_every = 0.01\n"
    "sweep.epsilons = 0.4, 0.2, 0.1\n"
    "ic.width = 0.1\n"
)


def write_diagnostics(path, energies, mass=(1.0, 1.0, 1.0)):
    frame = pd.DataFrame(
        {
            "t": [0.0, 0.1, 0.2],
            "mass": list(mass),
            "phase_mass": [0.3, 0.3, 0.3],
            "E_total": list(energies),
            "dissipation_cum": [0.0, 0.01, 0.02],
        }
    )
    frame.to_csv(path, index=False)
    return path


def write_sweep_table(path, sup_etilde):
    eps = [0.4, 0.2, 0.1]
    frame = pd.DataFrame(
        {
            "epsilon": eps,
            "sup_Etilde": sup_etilde,
            "order_running": [None, 1.0, 1.0],
            "final_l1_rho": eps,
            "final_l2_v": eps,
            "final_h1_c": eps,
            "energy_violation": [0.0, 0.0, 0.0],
        }
    )
    frame.to_csv(path, index=False)
    return path


def test_parser_global_options():
    args = build_parser().parse_args(["--threads", "4", "--no-plots", "sweep", "run.cfg"])
    assert args.threads == 4
    assert args.no_plots
    assert args.command == "sweep"
    assert args.config == "run.cfg"


def test_parser_requires_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


def test_verify_assumptions_pass(write_config, capsys):
    assert main(["verify-assumptions", str(write_config("physics.gamma = 2.4\n"))]) == EXIT_OK
    out = capsys.readouterr().out
    assert "PASS" in out


def test_verify_assumptions_failure(write_config):
    assert main(["verify-assumptions", str(write_config("physics.kappa = 0.5\n"))]) == EXIT_ACCEPTANCE


def test_missing_config_is_an_error(tmp_path):
    assert main(["verify-assumptions", str(tmp_path / "absent.cfg")]) == EXIT_ERROR


def test_seed_is_exported(write_config, monkeypatch):
    monkeypatch.delenv("LOWMACH_SEED", raising=False)
    main(["--seed", "7", "verify-assumptions", str(write_config("grid.nx = 8\n"))])
    assert os.environ["LOWMACH_SEED"] == "7"
    monkeypatch.delenv("LOWMACH_SEED")


class TestCheck:
    def test_passing_diagnostics(self, tmp_path):
        path = write_diagnostics(tmp_path / "run.csv", [1.0, 0.95, 0.9])
        assert main(["check", str(path)]) == EXIT_OK

    def test_energy_growth_fails(self, tmp_path):
        path = write_diagnostics(tmp_path / "run.csv", [1.0, 1.2, 1.3])
        assert main(["check", str(path)]) == EXIT_ACCEPTANCE

    def test_mass_drift_fails(self, tmp_path):
        path = write_diagnostics(tmp_path / "run.csv", [1.0, 0.95, 0.9], mass=(1.0, 1.0, 1.0 + 1e-9))
        assert main(["check", str(path)]) == EXIT_ACCEPTANCE
        assert main(["check", "--mass-tol", "1e-6", str(path)]) == EXIT_OK

    def test_sweep_table(self, tmp_path):
        assert main(["check", str(write_sweep_table(tmp_path / "sweep.csv", [0.8, 0.4, 0.2]))]) == EXIT_OK

    def test_sweep_table_without_decay(self, tmp_path):
        assert main(["check", str(write_sweep_table(tmp_path / "sweep.csv", [0.8, 0.8, 0.8]))]) == EXIT_ACCEPTANCE

    def test_unreadable_file(self, tmp_path):
        assert main(["check", str(tmp_path / "absent.csv")]) == EXIT_ERROR


@pytest.mark.slow
def test_run_compressible_writes_diagnostics(write_config, tmp_path):
    out = tmp_path / "out"
    code = main(["--output-dir", str(out), "run-compressible", str(write_config(TINY)), "--eps", "0.2"])
    assert code in (EXIT_OK, EXIT_ACCEPTANCE)
    frame = pd.read_csv(out / "compressible_eps0.2.csv")
    assert list(frame["t"]) == pytest.approx([0.0, 0.01, 0.02])


@pytest.mark.slow
def test_sweep_command(write_config, tmp_path):
    out = tmp_path / "out"
    code = main(["--output-dir", str(out), "--no-plots", "sweep", str(write_config(TINY))])
    assert code in (EXIT_OK, EXIT_ACCEPTANCE)
    assert (out / "sweep.csv").exists()
    assert (out / "config.cfg").exists()
    assert not list(out.glob("*.svg"))


def test_module_runs_as_a_script(write_config, monkeypatch):
    path = write_config("physics.gamma = 2.4\n")
    monkeypatch.setattr(sys, "argv", ["lowmach", "verify-assumptions", str(path)])
    with warnings.catch_warnings(), pytest.raises(SystemExit) as exit_info:
        warnings.simplefilter("ignore", RuntimeWarning)
        runpy.run_module("lowmach.cli", run_name="__main__")
    assert exit_info.value.code == EXIT_OK
