"""
CLI package.
Typer-based command line interface for the OverHear toolkit.
"""

from .app import app, create_app, launch, main
from .shared_utils import CliState, console, get_config, handle_errors, print_table

__all__ = [
    'app',
    'create_app',
    'launch',
    'main',
    'CliState',
    'console',
    'get_config',
    'handle_errors',
    'print_table',
]
