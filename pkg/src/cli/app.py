#!/usr/bin/env python3
"""
OverHear Toolkit - Command Line Interface
=========================================

Assembles all command modules into a single Typer application.

Commands:
- 🎹 synth, preprocess, segment, features
- 🧠 train, kbtype, eval
- 🔎 infer, words
- 📊 study

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 internal error.

Usage:
    python -m src.cli.app --help
    # or from root:
    python app.py --help
"""

import sys
from typing import List, Optional

import click
import typer

from src import __version__
from src.utils.logging_utils import setup_logging

from .commands import (
    register_data_commands,
    register_infer_commands,
    register_model_commands,
    register_study_commands,
)
from .shared_utils import CliState, console

EXIT_USAGE = 1


def _version(value: bool):
    if value:
        console.print(f"overhear {__version__}")
        raise typer.Exit()


def create_app() -> typer.Typer:
    """
    Create and configure the Typer application.

    Returns:
        typer.Typer: application with every command registered
    """
    app = typer.Typer(name="overhear", add_completion=False, no_args_is_help=True,
                      help="Keystroke inference from headphone audio and head-worn accelerometers.")

    @app.callback()
    def main_options(
        ctx: typer.Context,
        config: Optional[str] = typer.Option(None, "--config", "-c", help="Pipeline config YAML"),
        log_level: Optional[str] = typer.Option(None, help="DEBUG | INFO | WARNING | ERROR"),
        log_file: Optional[str] = typer.Option(None, help="Also write the log to this file"),
        version: bool = typer.Option(False, "--version", callback=_version, is_eager=True),
    ):
        setup_logging(log_level, log_file)
        ctx.obj = CliState(config_path=config)

    register_data_commands(app)
    register_model_commands(app)
    register_infer_commands(app)
    register_study_commands(app)
    return app


app = create_app()


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run the CLI and return the exit code (usage errors map to 1).
    """
    command = typer.main.get_command(app)
    try:
        result = command.main(args=argv, prog_name="overhear", standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        return EXIT_USAGE
    except click.Abort:
        console.print("Aborted", style="red")
        return EXIT_USAGE
    return result if isinstance(result, int) else 0


def launch():
    """Launch the command line interface."""
    sys.exit(main())


if __name__ == "__main__":
    launch()
