"""Study plots and Markdown summaries."""

from .report_generator import PlotSpec, generate_markdown_report, plot_study

__all__ = [
    'PlotSpec',
    'plot_study',
    'generate_markdown_report',
]
