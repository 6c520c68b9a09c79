"""
Shared utilities for the CLI
Config resolution, error-to-exit-code mapping and rich output helpers
used by every command module.
"""

import functools
import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence

import typer
from rich.console import Console
from rich.table import Table

from src.automation.config import ConfigManager, PipelineConfig
from src.errors import ConfigError, OverhearError

logger = logging.getLogger(__name__)

console = Console()

EXIT_INTERNAL = 3


@dataclass
class CliState:
    """Global options shared by all commands (set in the app callback)."""
    config_path: Optional[str] = None


def get_config(ctx: typer.Context, seed: Optional[int] = None) -> PipelineConfig:
    """
    Resolve the pipeline config: ``--config`` file or defaults, then
    ``OVERHEAR_SEED``, then the command's own ``--seed``.

    Returns:
        PipelineConfig: validated configuration
    """
    state: CliState = ctx.obj or CliState()
    config = ConfigManager().load_or_default(state.config_path)
    if seed is not None:
        config.seed = seed
    return config


def handle_errors(func: Callable) -> Callable:
    """
    Map toolkit errors to exit codes.

    OverhearError -> its ``exit_code``; anything unexpected -> 3 with the
    traceback logged at DEBUG.
    """
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (typer.Exit, typer.Abort):
            raise
        except OverhearError as exc:
            console.print(f"❌ {type(exc).__name__}: {exc}", style="red")
            raise typer.Exit(exc.exit_code)
        except Exception as exc:
            logger.debug("unexpected failure", exc_info=True)
            console.print(f"❌ Internal error: {exc}", style="red")
            raise typer.Exit(EXIT_INTERNAL)
    return wrapper


def require_one(**options) -> str:
    """
    Name of the single option that is set.

    Raises:
        ConfigError: none or several of the options are set
    """
    chosen = [name for name, value in options.items() if value]
    if len(chosen) != 1:
        names = ", ".join(f"--{name.replace('_', '-')}" for name in options)
        raise ConfigError(f"give exactly one of {names}")
    return chosen[0]


def print_table(title: str, rows: Sequence[Dict], columns: Optional[List[str]] = None):
    """Print a list of dicts as a rich table (floats to 3 decimals)."""
    table = Table(title=title)
    columns = columns or (list(rows[0].keys()) if rows else [])
    for column in columns:
        table.add_column(str(column))
    for row in rows:
        cells = []
        for column in columns:
            value = row.get(column, "")
            cells.append(f"{value:.3f}" if isinstance(value, float) else str(value))
        table.add_row(*cells)
    console.print(table)
