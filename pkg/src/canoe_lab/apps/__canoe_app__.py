from pathlib import Path
from typing import Optional
import logging
import sys

import click
import pandas as pd
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from canoe_lab.exceptions import CanoeLabError
from canoe_lab.experiments.config import load_config
from canoe_lab.experiments.pool import default_workers
from canoe_lab.experiments.runner import CommandResult, RunOptions, run_command
from canoe_lab.experiments.self_test import run_self_test
from canoe_lab.experiments.system import DEFAULT_LIMIT_QUBITS

console = Console()

PREVIEW_ROWS = 20


def _setup_logging(level: str) -> None:
    logging.basicConfig(
        level=level.upper(),
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), rich_tracebacks=False)],
        force=True,
    )


def _frame_table(title: str, frame: pd.DataFrame) -> Table:
    table = Table(title=title, show_lines=False)
    for column in frame.columns:
        table.add_column(str(column), overflow="fold")
    for _, row in frame.head(PREVIEW_ROWS).iterrows():
        table.add_row(*[f"{v:.6g}" if isinstance(v, float) else str(v) for v in row.tolist()])
    return table


def _show(result: CommandResult) -> None:
    for name, frame in result.tables.items():
        if frame.empty:
            continue
        console.print(_frame_table(f"{result.command}: {name}", frame))
    for note in result.notes:
        console.print(f"[yellow]note:[/yellow] {note}")
    for path in result.outputs:
        console.print(f"[green]wrote[/green] {path}")


def _run(command: str, config: str, out: Optional[str], seed_base: int, workers: Optional[int], limit_qubits: int) -> None:
    try:
        cfg = load_config(config)
        opts = RunOptions(
            out_dir=Path(out) if out else None,
            seed_base=seed_base,
            workers=workers,
            limit_qubits=limit_qubits,
        )
        result = run_command(command, cfg, opts)
    except CanoeLabError as err:
        logging.error(err.message)
        raise click.ClickException(err.message)
    _show(result)


def sweep_options(fn):
    """
    Options shared by the sweep commands.
    """
    fn = click.option("--log-level", default="INFO", show_default=True,
                      type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False))(fn)
    fn = click.option("--limit-qubits", default=DEFAULT_LIMIT_QUBITS, show_default=True, type=click.IntRange(min=1),
                      help="Refuse systems with more qubits.")(fn)
    fn = click.option("--workers", default=None, type=click.IntRange(min=1),
                      help=f"Worker processes [default: {default_workers()}].")(fn)
    fn = click.option("--seed-base", default=0, show_default=True, type=click.IntRange(0, 2 ** 64 - 1),
                      help="Added to every configured seed.")(fn)
    fn = click.option("--out", default=None, type=click.Path(file_okay=False),
                      help="Output directory (overrides [output] directory).")(fn)
    fn = click.option("--config", "config", required=True, type=click.Path(exists=True, dir_okay=False),
                      help="Experiment TOML file.")(fn)
    return fn


@click.group()
def main() -> None:
    """
    Desk-scale simulation lab for hybrid classical-quantum subspace eigensolvers.
    """


@main.command("exact")
@sweep_options
def exact(config: str, out: Optional[str], seed_base: int, workers: Optional[int], limit_qubits: int, log_level: str) -> None:
    """
    Infinite-shot energies over the (N_c, N_q) grid.
    """
    _setup_logging(log_level)
    _run("exact", config, out, seed_base, workers, limit_qubits)


@main.command("sample")
@sweep_options
def sample(config: str, out: Optional[str], seed_base: int, workers: Optional[int], limit_qubits: int, log_level: str) -> None:
    """
    Shot sweep of the sampled classical-quantum block.
    """
    _setup_logging(log_level)
    _run("sample", config, out, seed_base, workers, limit_qubits)


@main.command("solver-bench")
@sweep_options
def solver_bench(config: str, out: Optional[str], seed_base: int, workers: Optional[int], limit_qubits: int, log_level: str) -> None:
    """
    Solver modes and rank thresholds under sampled and synthetic noise.
    """
    _setup_logging(log_level)
    _run("solver-bench", config, out, seed_base, workers, limit_qubits)


@main.command("analyze")
@sweep_options
def analyze(config: str, out: Optional[str], seed_base: int, workers: Optional[int], limit_qubits: int, log_level: str) -> None:
    """
    Complexity tables, W_unres, shot extrapolation and error-rate bounds.
    """
    _setup_logging(log_level)
    _run("analyze", config, out, seed_base, workers, limit_qubits)


@main.command("self-test")
@click.option("--log-level", default="INFO", show_default=True,
              type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False))
def self_test(log_level: str) -> None:
    """
    Oracle checks on the built-in toy systems; exits 1 on any failure.
    """
    _setup_logging(log_level)
    results = run_self_test()
    table = Table(title="canoe self-test")
    for column in ("check", "system", "error", "tolerance", "status"):
        table.add_column(column)
    for r in results:
        status = "[green]pass[/green]" if r.passed else f"[red]FAIL[/red] {r.detail}"
        table.add_row(r.name, r.system, f"{r.error:.3e}", f"{r.tolerance:.1e}", status)
    console.print(table)
    if not all(r.passed for r in results):
        sys.exit(1)


if __name__ == "__main__":
    main()
