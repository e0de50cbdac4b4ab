"""
DCPSO Experiment Runner
Command-line entry point: single configurations, ablations and M x N grids on the moving peaks

Usage:
    python experiment_runner.py run --config config.json --out outputs/run1 --runs 30
    python experiment_runner.py grid --out outputs/grid --ablation both
"""

import sys
from pathlib import Path
from typing import List, Optional

import click
import structlog

from src.analytics import (
    aggregate_grid,
    emit_metrics,
    print_summary_report,
    render_plot,
    summary_frame,
    write_pivot_tables,
)
from src.batch import run_configs
from src.config import ExperimentConfig, parse_config
from src.errors import ConfigurationError, OutputError
from src.logging_config import configure_logging
from src.settings import RuntimeSettings

logger = structlog.get_logger()

EXIT_CONFIG_ERROR = 2
EXIT_IO_ERROR = 3

DEFAULT_M_VALUES = "10,30,50,70,100"
DEFAULT_N_VALUES = "2,3,4,5,7"


def _ablation_variants(config: ExperimentConfig, ablation: str) -> List[ExperimentConfig]:
    if ablation == "cpso":
        return [config.with_overrides(diversity_enabled=False)]
    if ablation == "dcpso":
        return [config.with_overrides(diversity_enabled=True)]
    return [config.with_overrides(diversity_enabled=False), config.with_overrides(diversity_enabled=True)]


def _parse_int_list(value: str, option: str) -> List[int]:
    try:
        return [int(v) for v in value.split(",") if v.strip()]
    except ValueError as e:
        raise ConfigurationError(f"expected comma-separated integers, got {value!r}", key=option) from e


def _load(config_path: Optional[str], seed: Optional[int], runs: Optional[int]) -> ExperimentConfig:
    config = parse_config(config_path)
    overrides = {}
    if seed is not None:
        overrides["base_seed"] = seed
    if runs is not None:
        overrides["runs"] = runs
    return config.with_overrides(**overrides) if overrides else config


def _execute(configs: List[ExperimentConfig], out: str, concurrency: int, plot: bool, pivots: bool) -> None:
    results = run_configs(configs, concurrency=concurrency)
    summaries = aggregate_grid(results)
    written = emit_metrics(results, summaries, out)
    if pivots:
        for mode in sorted({s.mode for s in summaries}):
            write_pivot_tables(summary_frame(summaries), Path(out) / mode, mode=mode)
    if plot:
        import pandas as pd
        render_plot(pd.read_csv(written["plot_data"]), Path(out) / "offline_error_vs_M.png")
    print_summary_report(summaries)
    click.echo(f"✅ Metrics written to {out}")


def _guarded(action) -> None:
    try:
        action()
    except ConfigurationError as e:
        logger.error("configuration_error", key=e.key, error=str(e))
        click.echo(f"Configuration error: {e}", err=True)
        sys.exit(EXIT_CONFIG_ERROR)
    except OutputError as e:
        logger.error("output_error", path=e.path, error=str(e))
        click.echo(f"I/O error: {e}", err=True)
        sys.exit(EXIT_IO_ERROR)


@click.group()
@click.option("--log-level", default=None, help="Override DCPSO_LOG_LEVEL")
@click.option("--json-logs/--console-logs", default=None, help="Structured JSON logs on stderr")
@click.pass_context
def cli(ctx: click.Context, log_level: Optional[str], json_logs: Optional[bool]) -> None:
    """Diverse clustering PSO on the moving peaks benchmark"""
    settings = RuntimeSettings()
    configure_logging(log_level or settings.log_level, settings.log_json if json_logs is None else json_logs)
    ctx.obj = settings


def _common_options(fn):
    options = [
        click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
                     help="Flat JSON experiment config"),
        click.option("--out", default=None, help="Output directory (default DCPSO_OUTPUT_DIR)"),
        click.option("--seed", type=int, default=None, help="Base seed (run i uses seed + i)"),
        click.option("--runs", type=int, default=None, help="Runs per configuration"),
        click.option("--ablation", type=click.Choice(["cpso", "dcpso", "both"]), default=None,
                     help="cpso = diversity mechanism disabled"),
        click.option("--concurrency", type=int, default=None, help="Worker processes (default DCPSO_MAX_CONCURRENCY)"),
        click.option("--plot/--no-plot", default=False, help="Also render offline error vs M as PNG"),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


@cli.command("run")
@_common_options
@click.pass_obj
def run_command(settings: RuntimeSettings, config_path, out, seed, runs, ablation, concurrency, plot) -> None:
    """Run one configuration and write its metrics"""

    def action() -> None:
        config = _load(config_path, seed, runs)
        configs = _ablation_variants(config, ablation) if ablation else [config]
        _execute(configs, out or settings.output_dir, concurrency or settings.max_concurrency, plot, pivots=False)

    _guarded(action)


@cli.command("grid")
@_common_options
@click.option("--m-values", default=DEFAULT_M_VALUES, show_default=True, help="Cradle swarm sizes")
@click.option("--n-values", default=DEFAULT_N_VALUES, show_default=True, help="max_subsize values")
@click.pass_obj
def grid_command(settings: RuntimeSettings, config_path, out, seed, runs, ablation, concurrency, plot,
                 m_values, n_values) -> None:
    """Sweep M x max_subsize and write per-cell summaries and table pivots"""

    def action() -> None:
        base = _load(config_path, seed, runs)
        configs = []
        for m in _parse_int_list(m_values, "m_values"):
            for n in _parse_int_list(n_values, "n_values"):
                cell = base.with_overrides(M=m, max_subsize=n)
                configs.extend(_ablation_variants(cell, ablation) if ablation else [cell])
        _execute(configs, out or settings.output_dir, concurrency or settings.max_concurrency, plot, pivots=True)

    _guarded(action)


if __name__ == "__main__":
    cli()
