"""
Mach-parameter sweep.

One model-H reference run is made first, with its step capped below the
finest compressible step of the sweep. Every epsilon then gets an
independent compressible run from well-prepared data, compared sample by
sample with the reference interpolated in time. Runs may execute on a
thread pool; records are always assembled in the configured epsilon order.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np
from scipy.integrate import trapezoid

from ..exceptions import LowMachError, TrajectoryError
from ..metrics import RunMetrics
from ..numerics.io import write_field
from ..physics.compressible import run_compressible, stable_dt
from ..physics.energetics import (
    energy_inequality_check,
    gronwall_constant,
    norm_distances,
    relative_dissipation,
    relative_energy,
    uniform_estimates_report,
)
from ..physics.model_h import run_model_h
from ..physics.states import lerp_states
from ..physics.trajectory import Trajectory, interpolate_reference
from ..schemas.config import SimulationConfig
from ..schemas.reports import EpsilonRecord, SweepResult
from .convergence import MIN_PAIRS, fit_convergence_order, uniform_bound_check
from .initial_data import well_prepared_initial_data

logger = logging.getLogger(__name__)


def run_label(eps: float) -> str:
    """File-safe label of one compressible run."""
    return f"compressible_eps{eps:g}"


class SweepManager:
    """Coordinates the reference run and the per-epsilon compressible runs."""

    def __init__(
        self,
        config: SimulationConfig,
        output_dir: Optional[Union[str, Path]] = None,
        threads: int = 1,
        metrics_dir: Optional[str] = None,
    ):
        self.config = config
        self.params = config.phys_params()
        self.output_dir = Path(output_dir or config.output.directory)
        self.threads = max(1, threads)
        self.metrics_dir = metrics_dir
        self.reference: Optional[Trajectory] = None
        self._trajectories: Dict[float, Trajectory] = {}

    # -----------------------------------------------------------------
    # Reference
    # -----------------------------------------------------------------

    def finest_dt(self) -> float:
        """Smallest initial compressible step over the sweep."""
        cfl = self.config.time.cfl
        steps = [
            stable_dt(well_prepared_initial_data(self.config, eps).compressible, self.params, cfl)
            for eps in self.config.sweep.epsilons
        ]
        return min(steps)

    def run_reference(self) -> Trajectory:
        """Model-H reference run shared by every epsilon."""
        time_cfg = self.config.time
        max_dt = time_cfg.reference_dt_factor * self.finest_dt()
        initial = well_prepared_initial_data(self.config, self.config.sweep.epsilons[0]).incompressible
        metrics = RunMetrics("model_h", self.metrics_dir)
        self.reference = run_model_h(
            initial, self.params, time_cfg.t_end, time_cfg.sample_every, time_cfg.cfl, max_dt=max_dt, metrics=metrics
        )
        metrics.save_metrics("reference")
        self.reference.to_csv(self.output_dir / "runs" / "model_h_reference.csv")
        logger.info(f"Reference run done: {self.reference.steps} steps, dt cap {max_dt:.3e}")
        return self.reference

    def reference_metadata(self) -> Dict[str, float]:
        if self.reference is None:
            return {}
        return {
            "steps": float(self.reference.steps),
            "samples": float(len(self.reference)),
            "t_end": float(self.reference.times[-1]),
            "min_dt": float(np.min(self.reference.column("dt")[1:])) if len(self.reference) > 1 else 0.0,
        }

    # -----------------------------------------------------------------
    # Per-epsilon runs
    # -----------------------------------------------------------------

    def run_compressible(self, eps: float) -> Trajectory:
        data = well_prepared_initial_data(self.config, eps)
        time_cfg = self.config.time
        metrics = RunMetrics(run_label(eps), self.metrics_dir)
        trajectory = run_compressible(
            data.compressible, self.params, time_cfg.t_end, time_cfg.sample_every, time_cfg.cfl, metrics=metrics
        )
        metrics.save_metrics("sweep")
        metrics.log_summary()
        return trajectory

    def evaluate(self, eps: float, trajectory: Trajectory) -> EpsilonRecord:
        """Compare a compressible trajectory with the reference and summarize it."""
        if self.reference is None:
            raise TrajectoryError("the reference run has not been made")
        refs = interpolate_reference(self.reference.states, trajectory.times, lerp_states)
        etilde = []
        rel_diss = []
        for row, comp, ref in zip(trajectory.rows, trajectory.states, refs):
            etilde.append(relative_energy(comp, ref, self.params).value_Etilde)
            rel_diss.append(relative_dissipation(comp, ref, self.params))
            row["Etilde"] = etilde[-1]
            row["relative_dissipation"] = rel_diss[-1]

        times = trajectory.times
        diagnostics = trajectory.to_csv(self.output_dir / "runs" / f"{run_label(eps)}.csv")
        if self.config.output.emit_fields:
            self._write_snapshots(eps, trajectory)
        inequality = energy_inequality_check(trajectory, self.config.sweep.energy_tol)
        data = well_prepared_initial_data(self.config, eps)
        return EpsilonRecord(
            eps=eps,
            sup_etilde=float(np.max(etilde)),
            etilde_initial=etilde[0],
            final_distances=norm_distances(trajectory.states[-1], refs[-1]),
            uniform=uniform_estimates_report(trajectory, eps),
            energy_violation=inequality.worst_violation,
            relative_dissipation_integral=float(trapezoid(rel_diss, times)) if len(times) > 1 else 0.0,
            gronwall_constant=gronwall_constant(times, etilde, eps),
            initial_data_bound=data.hypothesis_bound,
            diagnostics_file=str(diagnostics),
        )

    def _write_snapshots(self, eps: float, trajectory: Trajectory) -> None:
        final = trajectory.states[-1]
        directory = self.output_dir / "fields" / run_label(eps)
        write_field(directory / "rho.csv", final.rho)
        write_field(directory / "c.csv", final.c)
        write_field(directory / "mu.csv", final.mu)
        write_field(directory / "v.csv", final.velocity)

    def run_epsilon(self, eps: float) -> EpsilonRecord:
        """Run and evaluate one epsilon; failures become records with ``ok=False``."""
        try:
            logger.info(f"Running eps={eps}")
            trajectory = self.run_compressible(eps)
            self._trajectories[eps] = trajectory
            record = self.evaluate(eps, trajectory)
            logger.info(f"eps={eps}: sup Etilde={record.sup_etilde:.4e}, energy violation {record.energy_violation:.3e}")
            return record
        except LowMachError as e:
            logger.warning(f"Skipping eps={eps}: {e}")
            return EpsilonRecord(eps=eps, ok=False, error=str(e))

    # -----------------------------------------------------------------
    # Sweep
    # -----------------------------------------------------------------

    def run(self) -> SweepResult:
        """Reference run, all epsilons, fitted order and uniform-bound verdict."""
        sweep = self.config.sweep
        if self.reference is None:
            self.run_reference()

        if self.threads == 1:
            records = [self.run_epsilon(eps) for eps in sweep.epsilons]
        else:
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                records = list(pool.map(self.run_epsilon, sweep.epsilons))

        survivors = [r for r in records if r.ok]
        if len(survivors) < MIN_PAIRS:
            failed = ", ".join(f"{r.eps:g}" for r in records if not r.ok)
            raise TrajectoryError(f"only {len(survivors)} epsilon runs survived (failed: {failed})")

        order = fit_convergence_order([(r.eps, r.sup_etilde) for r in survivors])
        uniform = None
        if all(r.uniform is not None for r in survivors):
            uniform = uniform_bound_check(
                [r.uniform for r in survivors], sweep.uniform_factor, sweep.exterior_exponent_threshold
            )
        logger.info(f"Sweep finished: {len(survivors)}/{len(records)} runs, fitted order {order:.3f}")
        return SweepResult(
            records=records, fitted_order=order, uniform_check=uniform, reference=self.reference_metadata()
        )

    def get_trajectory(self, eps: float) -> Optional[Trajectory]:
        return self._trajectories.get(eps)

    def get_trajectories(self) -> List[Trajectory]:
        return [self._trajectories[e] for e in self.config.sweep.epsilons if e in self._trajectories]


def run_sweep(
    config: SimulationConfig,
    output_dir: Optional[Union[str, Path]] = None,
    threads: int = 1,
    metrics_dir: Optional[str] = None,
) -> SweepResult:
    """Run the full sweep described by ``config``."""
    return SweepManager(config, output_dir, threads, metrics_dir).run()
