"""
Full Grid Reproduction
Sweeps M x max_subsize for DCPSO and the diversity-disabled baseline, then writes
table-shaped CSVs (rows M, columns max_subsize) and the offline-error curves.

    python scripts/reproduce_tables.py --runs 50 --concurrency 8 --out outputs/tables
"""

import sys
from pathlib import Path

import click

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.analytics import (  # noqa: E402
    aggregate_grid,
    emit_metrics,
    plot_frame,
    print_summary_report,
    render_plot,
    summary_frame,
    write_pivot_tables,
)
from src.batch import run_configs  # noqa: E402
from src.config import parse_config  # noqa: E402
from src.logging_config import configure_logging  # noqa: E402

M_VALUES = [10, 30, 50, 70, 100]
N_VALUES = [2, 3, 4, 5, 7]
COMPARISON_CELL = (70, 3)


@click.command()
@click.option("--config", "config_path", default=None, help="Flat JSON base config")
@click.option("--runs", type=int, default=50, show_default=True)
@click.option("--concurrency", type=int, default=1, show_default=True)
@click.option("--out", default="outputs/tables", show_default=True)
def main(config_path, runs, concurrency, out):
    configure_logging("INFO")
    base = parse_config(config_path).with_overrides(runs=runs)

    configs = [base.with_overrides(M=m, max_subsize=n) for m in M_VALUES for n in N_VALUES]
    m, n = COMPARISON_CELL
    configs.append(base.with_overrides(M=m, max_subsize=n, diversity_enabled=False))

    print(f"\n{'='*70}")
    print(f"GRID: {len(M_VALUES)} x {len(N_VALUES)} cells + baseline, {runs} runs each")
    print(f"{'='*70}\n")

    results = run_configs(configs, concurrency=concurrency)
    summaries = aggregate_grid(results)
    emit_metrics(results, summaries, out)
    write_pivot_tables(summary_frame(summaries), out, mode="dcpso")
    render_plot(plot_frame(summaries), Path(out) / "offline_error_vs_M.png")
    print_summary_report(summaries)
    print(f"✅ Tables exported to {out}")


if __name__ == "__main__":
    main()
