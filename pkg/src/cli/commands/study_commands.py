"""
Study commands - study
"""

from typing import Optional

import typer

from src.automation.studies import STUDIES, run_study

from ..shared_utils import console, get_config, handle_errors, print_table


def study(
    ctx: typer.Context,
    name: str = typer.Argument(..., help=f"One of: {', '.join(STUDIES)}"),
    output_dir: str = typer.Option("results", help="Directory for <study>.csv/.png/.md"),
    quick: bool = typer.Option(False, help="Smaller corpus and forests"),
    seed: Optional[int] = typer.Option(None, help="Override the seed"),
):
    """Run a synthetic-corpus study and write its table, plot and summary."""
    config = get_config(ctx, seed)
    report = run_study(name, config, output_dir, quick)
    print_table(f"Study: {name}", report.table.to_dict(orient="records"))
    console.print(f"✅ {report.csv_path}, {report.plot_path}, {report.markdown_path}")


def register(app: typer.Typer):
    app.command()(handle_errors(study))
