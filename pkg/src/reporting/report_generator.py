"""
Study Report Generator
Renders study tables as grouped bar charts (PNG) and Markdown summaries
with the resolved pipeline config embedded.
"""

import logging
import os
from dataclasses import dataclass
from datetime import datetime
from typing import Dict, Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import pandas as pd
import yaml

from src.errors import ConfigError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PlotSpec:
    """Bars of ``metric`` per ``x`` value, one bar per ``hue`` value."""
    x: str
    metric: str
    hue: Optional[str] = None
    title: str = ""
    ylim: Optional[tuple] = (0.0, 1.0)


def _ensure_parent(path: str) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)


def plot_study(table: pd.DataFrame, spec: PlotSpec, path: str) -> str:
    """
    Zapisuje wykres słupkowy wyników badania.

    Raises:
        ConfigError: a column named by ``spec`` is missing from the table
    """
    needed = [c for c in (spec.x, spec.metric, spec.hue) if c]
    missing = [c for c in needed if c not in table.columns]
    if missing:
        raise ConfigError(f"study table has no column(s) {missing}")

    if spec.hue:
        data = table.pivot_table(index=spec.x, columns=spec.hue, values=spec.metric, sort=False)
    else:
        data = table.set_index(spec.x)[[spec.metric]]

    fig, ax = plt.subplots(figsize=(8, 5))
    data.plot.bar(ax=ax, rot=0)
    ax.set_title(spec.title)
    ax.set_xlabel(spec.x)
    ax.set_ylabel(spec.metric)
    if spec.ylim:
        ax.set_ylim(*spec.ylim)
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    _ensure_parent(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    logger.info("📊 Plot saved: %s", path)
    return path


def generate_markdown_report(study: str, table: pd.DataFrame, config: Dict, path: str,
                             description: str = "", extra: Optional[Dict] = None) -> str:
    """
    Generate Markdown summary of one study.

    Args:
        study: Study name
        table: Metrics per condition
        config: Resolved pipeline config (embedded as YAML)
        path: Output file
        description: One-paragraph summary of what was varied
        extra: Additional key/value facts (corpus size, quick mode, ...)

    Returns:
        Path to generated Markdown file
    """
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"# Study: {study}\n\n")
        f.write(f"**Generated:** {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}\n\n")
        if description:
            f.write(f"{description}\n\n")
        if extra:
            for key, value in extra.items():
                f.write(f"- **{key}:** {value}\n")
            f.write("\n")
        f.write("---\n\n")

        f.write("## 📋 Results\n\n")
        if not table.empty:
            f.write(table.to_markdown(index=False, floatfmt=".3f"))
            f.write("\n\n")
        else:
            f.write("*No rows*\n\n")
        f.write(f"![{study}]({study}.png)\n\n")

        f.write("---\n\n")
        f.write("## ⚙️ Configuration\n\n")
        f.write("```yaml\n")
        f.write(yaml.safe_dump(config, sort_keys=False))
        f.write("```\n")

    logger.info("📝 Markdown report saved: %s", path)
    return path
