"""Sweep artifacts: the summary table, a JSON record and static plots."""

import logging
from pathlib import Path
from typing import List, Optional, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

from ..exceptions import OutputError  # noqa: E402
from ..schemas.config import SimulationConfig  # noqa: E402
from ..schemas.reports import SweepResult  # noqa: E402
from .convergence import running_orders  # noqa: E402

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = [
    "epsilon",
    "sup_Etilde",
    "order_running",
    "final_l1_rho",
    "final_l2_v",
    "final_h1_c",
    "energy_violation",
]


def sweep_frame(result: SweepResult) -> pd.DataFrame:
    """One row per configured epsilon; failed runs keep their row with empty values."""
    survivors = result.survivors()
    orders = dict(zip((r.eps for r in survivors), running_orders([(r.eps, r.sup_etilde) for r in survivors])))
    rows = []
    for record in result.records:
        d = record.final_distances
        rows.append(
            {
                "epsilon": record.eps,
                "sup_Etilde": record.sup_etilde,
                "order_running": orders.get(record.eps),
                "final_l1_rho": d.l1_rho if d else None,
                "final_l2_v": d.l2_v if d else None,
                "final_h1_c": d.h1_c if d else None,
                "energy_violation": record.energy_violation,
            }
        )
    return pd.DataFrame(rows, columns=SWEEP_COLUMNS)


def _write_text(path: Path, text: str) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="\n") as f:
            f.write(text)
    except OSError as e:
        raise OutputError(f"Failed to write {path.name}: {e}", path=str(path)) from e
    return path


def plot_order(result: SweepResult, path: Path) -> Path:
    """Log-log plot of ``sup Etilde`` against eps with the fitted slope."""
    survivors = result.survivors()
    eps = [r.eps for r in survivors]
    values = [r.sup_etilde for r in survivors]
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.loglog(eps, values, "o-", label="sup Etilde")
    anchor = values[0] / eps[0] ** result.fitted_order
    ax.loglog(eps, [anchor * e ** result.fitted_order for e in eps], "--", label=f"slope {result.fitted_order:.2f}")
    ax.set_xlabel("eps")
    ax.set_ylabel("sup_t Etilde")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    return _save(fig, path)


def plot_energies(result: SweepResult, path: Path) -> Path:
    """Total energy against time for each surviving run."""
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for record in result.survivors():
        if not record.diagnostics_file:
            continue
        try:
            frame = pd.read_csv(record.diagnostics_file)
        except OSError as e:
            plt.close(fig)
            raise OutputError(f"Failed to read diagnostics: {e}", path=record.diagnostics_file) from e
        ax.plot(frame["t"], frame["E_total"], label=f"eps={record.eps:g}")
    ax.set_xlabel("t")
    ax.set_ylabel("E(t)")
    ax.legend()
    return _save(fig, path)


def _save(fig, path: Path) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, format="svg", metadata={"Date": None})
    except OSError as e:
        raise OutputError(f"Failed to write plot: {e}", path=str(path)) from e
    finally:
        plt.close(fig)
    return path


def emit_outputs(
    result: SweepResult,
    config: SimulationConfig,
    output_dir: Optional[Union[str, Path]] = None,
    plots: Optional[bool] = None,
) -> List[Path]:
    """Write ``sweep.csv``, ``sweep.json``, the normalized config and, optionally, plots."""
    if not result.records:
        raise OutputError("Nothing to emit: the sweep has no records")
    directory = Path(output_dir or config.output.directory)
    emit_plots = config.output.emit_plots if plots is None else plots

    written = []
    sweep_csv = directory / "sweep.csv"
    try:
        directory.mkdir(parents=True, exist_ok=True)
        sweep_frame(result).to_csv(sweep_csv, index=False, lineterminator="\n", float_format="%.17g")
    except OSError as e:
        raise OutputError(f"Failed to write sweep table: {e}", path=str(sweep_csv)) from e
    written.append(sweep_csv)
    written.append(_write_text(directory / "sweep.json", result.model_dump_json(indent=2)))
    written.append(config.to_file(directory / "config.cfg"))

    if emit_plots and len(result.survivors()) > 0:
        written.append(plot_order(result, directory / "etilde_vs_eps.svg"))
        written.append(plot_energies(result, directory / "energy_vs_time.svg"))

    logger.info(f"Wrote {len(written)} sweep artifacts to {directory}")
    return written
