"""
Command line interface.

    python -m lowmach sweep configs/default_sweep.cfg --threads 4
    python -m lowmach check output/sweep.csv

Exit codes: 0 when every check passes, 2 when an acceptance check fails,
1 on any other error.
"""

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd

from .config import Settings, get_settings
from .exceptions import AcceptanceError, LowMachError
from .harness.config_loader import load_config
from .harness.convergence import fit_convergence_order, sweep_failures
from .harness.initial_data import well_prepared_initial_data
from .harness.outputs import emit_outputs
from .harness.sweep import SweepManager, run_label
from .logging_config import setup_logging
from .metrics import RunMetrics
from .physics.compressible import run_compressible
from .physics.constitutive import verify_assumptions
from .physics.energetics import energy_inequality_check, uniform_estimates_report
from .physics.model_h import run_model_h
from .physics.trajectory import Trajectory

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_ACCEPTANCE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lowmach", description="Low Mach number limit lab for NSCH / model H")
    parser.add_argument("--output-dir", help="Directory for run artifacts (default: config output.directory)")
    parser.add_argument("--threads", type=int, help="Worker threads for independent runs")
    parser.add_argument("--seed", type=int, help="Seed exported as LOWMACH_SEED for randomized property tests")
    parser.add_argument("--no-plots", action="store_true", help="Do not write plot files")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run-compressible", help="Run the compressible system for one eps")
    p.add_argument("config")
    p.add_argument("--eps", type=float, help="Mach parameter (default: smallest configured eps)")

    p = sub.add_parser("run-modelh", help="Run the model-H limit system")
    p.add_argument("config")

    p = sub.add_parser("sweep", help="Run the eps sweep and write sweep.csv")
    p.add_argument("config")

    p = sub.add_parser("check", help="Re-run checks on a stored diagnostics CSV or sweep.csv")
    p.add_argument("csv")
    p.add_argument("--tol", type=float, default=1e-6, help="Relative energy inequality tolerance")
    p.add_argument("--mass-tol", type=float, default=1e-12, help="Relative mass drift tolerance")
    p.add_argument("--fit-threshold", type=float, default=0.8, help="Minimum fitted order for sweep.csv")

    p = sub.add_parser("verify-assumptions", help="Check the pressure law and potential hypotheses")
    p.add_argument("config")
    return parser


def _output_dir(args, config) -> Path:
    return Path(args.output_dir or config.output.directory)


def _report_inequality(trajectory: Trajectory, tol: float) -> List[str]:
    report = energy_inequality_check(trajectory, tol)
    print(f"energy inequality: worst violation {report.worst_violation:.3e} (tolerance {report.tolerance:.3e})")
    if report.passed:
        return []
    return [f"energy inequality violated by {report.worst_violation:.3e} at sample pair {report.worst_pair}"]


def _cmd_run_compressible(args, settings: Settings) -> List[str]:
    config = load_config(args.config)
    eps = args.eps if args.eps is not None else config.sweep.epsilons[-1]
    data = well_prepared_initial_data(config, eps)
    metrics = RunMetrics(run_label(eps), settings.metrics_dir)
    trajectory = run_compressible(
        data.compressible, config.phys_params(), config.time.t_end, config.time.sample_every, config.time.cfl, metrics
    )
    metrics.save_metrics("single")
    path = trajectory.to_csv(_output_dir(args, config) / f"{run_label(eps)}.csv")
    print(f"wrote {path}")
    return _report_inequality(trajectory, config.sweep.energy_tol)


def _cmd_run_modelh(args, settings: Settings) -> List[str]:
    config = load_config(args.config)
    data = well_prepared_initial_data(config, config.sweep.epsilons[0])
    metrics = RunMetrics("model_h", settings.metrics_dir)
    trajectory = run_model_h(
        data.incompressible,
        config.phys_params(),
        config.time.t_end,
        config.time.sample_every,
        config.time.cfl,
        metrics=metrics,
    )
    metrics.save_metrics("single")
    path = trajectory.to_csv(_output_dir(args, config) / "model_h.csv")
    print(f"wrote {path}")
    print(f"max divergence L2: {np.max(trajectory.column('divergence_l2')):.3e}")
    return _report_inequality(trajectory, config.sweep.energy_tol)


def _cmd_sweep(args, settings: Settings) -> List[str]:
    config = load_config(args.config)
    output_dir = _output_dir(args, config)
    manager = SweepManager(config, output_dir, args.threads or settings.threads, settings.metrics_dir)
    result = manager.run()
    for path in emit_outputs(result, config, output_dir, plots=False if args.no_plots else None):
        print(f"wrote {path}")

    survivors = result.survivors()
    print(f"fitted order: {result.fitted_order:.4f}")
    failures = sweep_failures(
        [r.eps for r in survivors],
        [r.sup_etilde for r in survivors],
        {
            "l1_rho": [r.final_distances.l1_rho for r in survivors],
            "l2_v": [r.final_distances.l2_v for r in survivors],
            "h1_c": [r.final_distances.h1_c for r in survivors],
        },
        result.fitted_order,
        config.sweep.fit_threshold,
    )
    if result.uniform_check is not None and not result.uniform_check.passed:
        failures.append(f"uniform estimates not bounded: {result.uniform_check.ratios}")
    for record in survivors:
        trajectory = manager.get_trajectory(record.eps)
        if trajectory is not None and not energy_inequality_check(trajectory, config.sweep.energy_tol).passed:
            failures.append(f"energy inequality violated at eps={record.eps:g}")
    return failures


def _check_sweep_csv(frame: pd.DataFrame, args) -> List[str]:
    ok = frame.dropna(subset=["sup_Etilde"])
    order = fit_convergence_order(list(zip(ok["epsilon"], ok["sup_Etilde"])))
    print(f"fitted order: {order:.4f} over {len(ok)} runs")
    norms = {name: list(ok[f"final_{name}"]) for name in ("l1_rho", "l2_v", "h1_c")}
    return sweep_failures(list(ok["epsilon"]), list(ok["sup_Etilde"]), norms, order, args.fit_threshold)


def _cmd_check(args, settings: Settings) -> List[str]:
    path = Path(args.csv)
    try:
        header = pd.read_csv(path, nrows=0)
    except (OSError, pd.errors.EmptyDataError) as e:
        raise LowMachError(f"Cannot read {path}: {e}") from e
    if "epsilon" in header.columns:
        return _check_sweep_csv(pd.read_csv(path), args)

    trajectory = Trajectory.from_csv(path)
    failures = _report_inequality(trajectory, args.tol)
    mass_columns = ("mass", "phase_mass") if trajectory.kind == "compressible" else ("mass_c",)
    for name in mass_columns:
        values = trajectory.column(name)
        drift = float(np.max(np.abs(values - values[0])) / max(abs(values[0]), 1e-300))
        print(f"{name} relative drift: {drift:.3e}")
        if drift > args.mass_tol:
            failures.append(f"{name} drifted by {drift:.3e}")
    if trajectory.kind == "compressible" and "kinetic_norm" in header.columns:
        estimates = uniform_estimates_report(trajectory, float(trajectory.column("eps")[0]))
        for name, value in estimates.bounded_quantities().items():
            print(f"{name}: {value:.6e}")
    return failures


def _cmd_verify_assumptions(args, settings: Settings) -> List[str]:
    config = load_config(args.config)
    report = verify_assumptions(config.pressure_law(), config.potential_spec())
    for line in report.summary_lines():
        print(line)
    return [f"assumption {c.name} failed (margin {c.margin:+.3e})" for c in report.failures()]


COMMANDS = {
    "run-compressible": _cmd_run_compressible,
    "run-modelh": _cmd_run_modelh,
    "sweep": _cmd_sweep,
    "check": _cmd_check,
    "verify-assumptions": _cmd_verify_assumptions,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point; returns the process exit code."""
    args = build_parser().parse_args(argv)
    settings = get_settings()
    setup_logging(settings)
    if args.seed is not None:
        os.environ["LOWMACH_SEED"] = str(args.seed)

    try:
        failures = COMMANDS[args.command](args, settings)
        if failures:
            raise AcceptanceError("; ".join(failures))
    except AcceptanceError as e:
        logger.error(f"Acceptance failed: {e}")
        print(f"FAIL: {e}", file=sys.stderr)
        return EXIT_ACCEPTANCE
    except LowMachError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    print("PASS")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
