"""
Analytics & Reporting
Multi-run aggregation, CSV emission, table pivots and offline-error curves
"""

from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Tuple, Union

import click
import numpy as np
import pandas as pd
import structlog

from src.errors import ContractViolation, OutputError
from src.harness import RunResult

logger = structlog.get_logger()

PER_CHANGE_COLUMNS = [
    "M", "max_subsize", "mode", "run_seed", "environment_index",
    "h_n", "f_n", "error", "peaks_found", "clusters_generated",
    "survived_clusters", "evaluations_used", "missed_detection",
]

SUMMARY_COLUMNS = [
    "M", "max_subsize", "mode", "runs",
    "offline_error_mean", "offline_error_std",
    "peaks_found_mean", "clusters_generated_mean", "survived_clusters_mean",
    "missed_detections",
]

PLOT_COLUMNS = ["series", "x", "y"]

TABLE_METRICS = {
    "offline_error": "offline_error_mean",
    "clusters_generated": "clusters_generated_mean",
    "peaks_found": "peaks_found_mean",
}


@dataclass
class RunSummary:
    """Aggregate over the runs of one (M, max_subsize, mode) cell"""
    M: int
    max_subsize: int
    mode: str
    runs: int
    offline_error_mean: float
    offline_error_std: float
    peaks_found_mean: float
    clusters_generated_mean: float
    survived_clusters_mean: float
    missed_detections: int


# =============================================================================
# AGGREGATION
# =============================================================================

def _per_run_mean(results: List[RunResult], attribute: str) -> float:
    return float(np.mean([np.mean([getattr(r, attribute) for r in res.records]) for res in results]))


def aggregate(results: List[RunResult]) -> RunSummary:
    """Mean/std of offline error and per-run means of the cluster metrics.

    std is the sample standard deviation (0 for a single run).
    """
    if not results:
        raise ContractViolation("aggregate needs at least one result")
    errors = np.array([r.offline_error for r in results])
    first = results[0]
    return RunSummary(
        M=first.M,
        max_subsize=first.max_subsize,
        mode=first.mode,
        runs=len(results),
        offline_error_mean=float(errors.mean()),
        offline_error_std=float(errors.std(ddof=1)) if len(results) > 1 else 0.0,
        peaks_found_mean=_per_run_mean(results, "peaks_found"),
        clusters_generated_mean=_per_run_mean(results, "clusters_generated"),
        survived_clusters_mean=_per_run_mean(results, "survived_clusters"),
        missed_detections=int(sum(r.missed_detections for r in results)),
    )


def aggregate_grid(results: Iterable[RunResult]) -> List[RunSummary]:
    """One summary per (M, max_subsize, mode) cell, in first-seen order"""
    cells: Dict[Tuple[int, int, str], List[RunResult]] = {}
    for result in results:
        cells.setdefault((result.M, result.max_subsize, result.mode), []).append(result)
    return [aggregate(cell) for cell in cells.values()]


# =============================================================================
# TABULAR VIEWS
# =============================================================================

def per_change_frame(results: Iterable[RunResult]) -> pd.DataFrame:
    rows = []
    for result in results:
        for record in result.records:
            rows.append({
                "M": result.M,
                "max_subsize": result.max_subsize,
                "mode": result.mode,
                "run_seed": result.seed,
                "environment_index": record.environment_index,
                "h_n": record.best_found,
                "f_n": record.optimum,
                "error": record.error,
                "peaks_found": record.peaks_found,
                "clusters_generated": record.clusters_generated,
                "survived_clusters": record.survived_clusters,
                "evaluations_used": record.evaluations_used,
                "missed_detection": record.missed_detection,
            })
    return pd.DataFrame(rows, columns=PER_CHANGE_COLUMNS)


def summary_frame(summaries: Iterable[RunSummary]) -> pd.DataFrame:
    return pd.DataFrame([asdict(s) for s in summaries], columns=SUMMARY_COLUMNS)


def plot_frame(summaries: Iterable[RunSummary]) -> pd.DataFrame:
    """Offline error against M, one series per (mode, max_subsize)"""
    rows = [
        {"series": f"{s.mode}_N={s.max_subsize}", "x": s.M, "y": s.offline_error_mean}
        for s in summaries
    ]
    frame = pd.DataFrame(rows, columns=PLOT_COLUMNS)
    return frame.sort_values(["series", "x"], kind="stable").reset_index(drop=True)


def pivot_tables(summary: pd.DataFrame, mode: str = "dcpso") -> Dict[str, pd.DataFrame]:
    """Rows M, columns max_subsize: offline error, clusters generated and peaks found"""
    cells = summary[summary["mode"] == mode]
    return {
        name: cells.pivot(index="M", columns="max_subsize", values=column).sort_index()
        for name, column in TABLE_METRICS.items()
    }


# =============================================================================
# OUTPUT
# =============================================================================

def _write_csv(frame: pd.DataFrame, path: Path, index: bool = False) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=index, lineterminator="\n")
    except OSError as e:
        raise OutputError(f"cannot write metrics ({e.strerror or e})", str(path)) from e
    return path


def emit_metrics(results: List[RunResult], summaries: List[RunSummary],
                 path: Union[str, Path]) -> Dict[str, Path]:
    """Write per_change.csv, summary.csv and plot_data.csv into directory `path`"""
    out_dir = Path(path)
    written = {
        "per_change": _write_csv(per_change_frame(results), out_dir / "per_change.csv"),
        "summary": _write_csv(summary_frame(summaries), out_dir / "summary.csv"),
        "plot_data": _write_csv(plot_frame(summaries), out_dir / "plot_data.csv"),
    }
    logger.info("metrics_written", out_dir=str(out_dir), runs=len(results), cells=len(summaries))
    return written


def write_pivot_tables(summary: pd.DataFrame, path: Union[str, Path], mode: str = "dcpso") -> Dict[str, Path]:
    out_dir = Path(path)
    return {
        name: _write_csv(table, out_dir / f"table_{name}.csv", index=True)
        for name, table in pivot_tables(summary, mode).items()
    }


def render_plot(plot_data: pd.DataFrame, path: Union[str, Path]) -> Path:
    """Offline error vs cradle swarm size, one line per series (PNG)"""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    path = Path(path)
    fig, ax = plt.subplots(figsize=(6, 4))
    for series, points in plot_data.groupby("series", sort=True):
        ax.plot(points["x"], points["y"], marker="o", label=series)
    ax.set_xlabel("cradle swarm size M")
    ax.set_ylabel("offline error")
    ax.legend(fontsize=8)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, dpi=150, bbox_inches="tight", facecolor="white")
    except OSError as e:
        raise OutputError(f"cannot write plot ({e.strerror or e})", str(path)) from e
    finally:
        plt.close(fig)
    return path


def print_summary_report(summaries: List[RunSummary]) -> None:
    """Console report of every cell"""

    click.echo(f"\n{'='*78}")
    click.echo("DCPSO EXPERIMENT SUMMARY")
    click.echo(f"{'='*78}")
    click.echo(f"{'mode':<7}{'M':>5}{'N':>4}{'runs':>6}{'offline err':>14}{'std':>9}"
               f"{'peaks':>8}{'clusters':>10}{'survived':>10}")
    for s in summaries:
        click.echo(
            f"{s.mode:<7}{s.M:>5}{s.max_subsize:>4}{s.runs:>6}"
            f"{s.offline_error_mean:>14.4f}{s.offline_error_std:>9.4f}"
            f"{s.peaks_found_mean:>8.2f}{s.clusters_generated_mean:>10.2f}{s.survived_clusters_mean:>10.2f}"
        )
        if s.missed_detections:
            click.echo(f"       ⚠️  {s.missed_detections} missed change detection(s)")
    click.echo(f"{'='*78}\n")
