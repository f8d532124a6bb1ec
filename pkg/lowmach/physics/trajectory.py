"""
Sampled trajectories and the shared time-marching loop.

Both solvers march with the same loop: steps are clipped so that every
sample time ``t0 + k * sample_every`` is hit exactly, the cumulative
dissipation is integrated step by step with the rate at the new level, and
one diagnostics row plus one state are kept per sample.
"""

import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from ..exceptions import LowMachError, OutputError, RunAbortedError, TrajectoryError
from ..metrics import RunMetrics

logger = logging.getLogger(__name__)

TIME_TOL = 1e-12

COMPRESSIBLE_COLUMNS = [
    "t",
    "mass",
    "phase_mass",
    "E_total",
    "E_kinetic",
    "E_pressure",
    "E_gradient",
    "E_potential",
    "dissipation_cum",
    "dt",
]

MODEL_H_COLUMNS = [
    "t",
    "mass_c",
    "E_total",
    "E_kinetic",
    "E_gradient",
    "E_potential",
    "dissipation_cum",
    "divergence_l2",
    "dt",
]


@dataclass
class Trajectory:
    """Sampled states plus one diagnostics row per sample."""

    kind: str
    states: List = field(default_factory=list)
    rows: List[Dict[str, float]] = field(default_factory=list)
    steps: int = 0

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def times(self) -> np.ndarray:
        return self.column("t")

    def column(self, name: str) -> np.ndarray:
        if self.rows and name not in self.rows[0]:
            raise TrajectoryError(f"trajectory has no column {name!r}")
        return np.array([row[name] for row in self.rows], dtype=float)

    def to_frame(self) -> pd.DataFrame:
        base = COMPRESSIBLE_COLUMNS if self.kind == "compressible" else MODEL_H_COLUMNS
        frame = pd.DataFrame(self.rows)
        extra = [c for c in frame.columns if c not in base]
        return frame[[c for c in base if c in frame.columns] + extra]

    def to_csv(self, path: Union[str, Path]) -> Path:
        """Write the diagnostics table (comma separated, LF line endings)."""
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            self.to_frame().to_csv(path, index=False, lineterminator="\n", float_format="%.17g")
        except OSError as e:
            raise OutputError(f"Failed to write diagnostics: {e}", path=str(path)) from e
        return path

    @classmethod
    def from_csv(cls, path: Union[str, Path]) -> "Trajectory":
        """Rebuild a diagnostics-only trajectory from a stored CSV."""
        path = Path(path)
        try:
            frame = pd.read_csv(path)
        except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
            raise OutputError(f"Failed to read diagnostics: {e}", path=str(path)) from e
        kind = "compressible" if "phase_mass" in frame.columns else "model_h"
        return cls(kind=kind, rows=frame.to_dict(orient="records"))


def sample_times(t0: float, t_end: float, sample_every: float) -> List[float]:
    """``t0 + k * sample_every`` for ``k = 0 .. floor((t_end - t0) / sample_every)``."""
    if not t_end >= t0:
        raise TrajectoryError(f"t_end={t_end} precedes the initial time {t0}")
    if not sample_every > 0:
        raise TrajectoryError(f"sample_every must be positive, got {sample_every}")
    count = int(math.floor((t_end - t0) / sample_every + 1e-9)) + 1
    return [t0 + k * sample_every for k in range(count)]


def march(
    initial,
    t_end: float,
    sample_every: float,
    stable_dt: Callable[[object], float],
    step: Callable[[object, float], Tuple[object, Dict[str, int]]],
    dissipation_rate: Callable[[object], float],
    diagnostics: Callable[[object, float, float], Dict[str, float]],
    kind: str,
    metrics: Optional[RunMetrics] = None,
) -> Trajectory:
    """Advance ``initial`` to ``t_end`` and sample it.

    Args:
        stable_dt: admissible step for a state
        step: ``(state, dt) -> (next_state, solver_iterations)``
        dissipation_rate: rate integrated into ``dissipation_cum``
        diagnostics: ``(state, dissipation_cum, last_dt) -> row``
    """
    times = sample_times(initial.t, t_end, sample_every)
    trajectory = Trajectory(kind=kind, states=[initial], rows=[diagnostics(initial, 0.0, 0.0)])
    state = initial
    cumulative = 0.0
    last_dt = 0.0

    for target in times[1:]:
        while target - state.t > TIME_TOL * max(1.0, abs(target)):
            remaining = target - state.t
            dt = min(stable_dt(state), remaining)
            started = time.perf_counter()
            try:
                state, iterations = step(state, dt)
            except LowMachError as e:
                logger.error(f"{kind} run aborted at t={state.t:.6g}: {e}")
                raise RunAbortedError(f"{kind} run aborted at t={state.t:.6g}: {e}", time=state.t) from e
            if dt == remaining:
                state = state.replace(t=target)
            cumulative += dt * dissipation_rate(state)
            last_dt = dt
            trajectory.steps += 1
            if metrics is not None:
                metrics.record_step(dt, time.perf_counter() - started)
                for solver, count in iterations.items():
                    metrics.record_solver(solver, count)
        state = state.replace(t=target)
        trajectory.states.append(state)
        trajectory.rows.append(diagnostics(state, cumulative, last_dt))
        logger.debug(f"{kind}: sampled t={target:.6g} after {trajectory.steps} steps")

    return trajectory


def interpolate_reference(reference: Sequence, times: Sequence[float], lerp: Callable) -> List:
    """Reference states at ``times`` by linear interpolation between its samples."""
    ref_times = np.array([s.t for s in reference])
    out = []
    for t in times:
        j = int(np.searchsorted(ref_times, t, side="left"))
        if j < len(ref_times) and abs(ref_times[j] - t) <= TIME_TOL * max(1.0, abs(t)):
            out.append(reference[j].replace(t=t))
            continue
        if j == 0 or j >= len(ref_times):
            raise TrajectoryError(f"time {t} lies outside the reference trajectory [{ref_times[0]}, {ref_times[-1]}]")
        out.append(lerp(reference[j - 1], reference[j], t))
    return out
