"""Run metrics collection and reporting.

Metrics are bookkeeping only: nothing in here feeds back into the numerics,
so runs stay bit-identical whether or not metrics are saved.
"""

import json
import logging
import os
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional

import psutil
from prometheus_client import CollectorRegistry, Counter, Gauge, Histogram

logger = logging.getLogger(__name__)

SOLVER_LABELS = ("cahn_hilliard", "pressure_poisson")


class RunMetrics:
    """Collects per-run solver metrics with Prometheus integration."""

    def __init__(self, source: str, metrics_dir: Optional[str] = None):
        """Initialize metrics collector.

        Args:
            source: run label, e.g. ``compressible_eps0.1`` or ``model_h``
            metrics_dir: directory for :meth:`save_metrics`; nothing is written when omitted
        """
        self.source = source
        self.metrics_dir = Path(metrics_dir) if metrics_dir else None
        self.start_time = datetime.now()

        self.registry = CollectorRegistry()

        self.steps = Counter(
            "lowmach_steps_total",
            "Total number of accepted time steps",
            ["source"],
            registry=self.registry,
        )
        self.solver_iterations = Counter(
            "lowmach_solver_iterations_total",
            "Total number of Krylov iterations",
            ["source", "solver"],
            registry=self.registry,
        )
        self.step_seconds = Histogram(
            "lowmach_step_seconds",
            "Wall time spent per accepted step",
            ["source"],
            registry=self.registry,
        )
        self.memory_usage = Gauge(
            "lowmach_memory_bytes",
            "Resident memory in bytes",
            ["source"],
            registry=self.registry,
        )

        self.step_metrics = {
            "accepted": 0,
            "min_dt": float("inf"),
            "max_dt": 0.0,
            "wall_seconds": 0.0,
        }
        self.solver_metrics: Dict[str, int] = {solver: 0 for solver in SOLVER_LABELS}
        self.memory_bytes = 0

    def record_step(self, dt: float, wall_seconds: float) -> None:
        """Record one accepted step."""
        self.steps.labels(source=self.source).inc()
        self.step_seconds.labels(source=self.source).observe(wall_seconds)
        self.step_metrics["accepted"] += 1
        self.step_metrics["min_dt"] = min(self.step_metrics["min_dt"], dt)
        self.step_metrics["max_dt"] = max(self.step_metrics["max_dt"], dt)
        self.step_metrics["wall_seconds"] += wall_seconds

    def record_solver(self, solver: str, iterations: int) -> None:
        """Record Krylov iterations for one solve."""
        self.solver_iterations.labels(source=self.source, solver=solver).inc(iterations)
        self.solver_metrics[solver] = self.solver_metrics.get(solver, 0) + iterations

    def update_memory_usage(self) -> None:
        """Sample resident memory of this process."""
        self.memory_bytes = psutil.Process(os.getpid()).memory_info().rss
        self.memory_usage.labels(source=self.source).set(self.memory_bytes)

    def get_all_metrics(self) -> Dict[str, Any]:
        """Get all collected metrics."""
        return {
            "source": self.source,
            "start_time": self.start_time.isoformat(),
            "end_time": datetime.now().isoformat(),
            "steps": dict(self.step_metrics),
            "solver_iterations": dict(self.solver_metrics),
            "memory_bytes": self.memory_bytes,
        }

    def save_metrics(self, run_id: Optional[str] = None) -> Optional[Path]:
        """Save metrics to a JSON file in ``metrics_dir``."""
        if self.metrics_dir is None:
            return None
        try:
            self.update_memory_usage()
            metrics = self.get_all_metrics()

            if run_id is None:
                run_id = datetime.now().strftime("%Y%m%d_%H%M%S")

            self.metrics_dir.mkdir(parents=True, exist_ok=True)
            filename = self.metrics_dir / f"{self.source}_{run_id}_metrics.json"
            with open(filename, "w") as f:
                json.dump(metrics, f, indent=2)

            logger.info(f"Metrics saved to {filename}")
            return filename

        except OSError as e:
            logger.error(f"Failed to save metrics: {str(e)}")
            return None

    def log_summary(self) -> None:
        """Log a summary of key metrics."""
        metrics = self.get_all_metrics()
        steps = metrics["steps"]
        iterations = metrics["solver_iterations"]
        logger.info(
            f"Run Summary ({self.source}):\n"
            f"Accepted steps: {steps['accepted']}\n"
            f"dt range: [{steps['min_dt']:.3e}, {steps['max_dt']:.3e}]\n"
            f"CH iterations: {iterations['cahn_hilliard']:.0f}\n"
            f"Poisson iterations: {iterations['pressure_poisson']:.0f}\n"
            f"Run Time: {(datetime.now() - self.start_time).total_seconds():.1f}s"
        )
