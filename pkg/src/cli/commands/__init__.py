"""
CLI command modules.
Each module registers its own commands on the Typer app.
"""

from .data_commands import register as register_data_commands
from .model_commands import register as register_model_commands
from .infer_commands import register as register_infer_commands
from .study_commands import register as register_study_commands

__all__ = [
    'register_data_commands',
    'register_model_commands',
    'register_infer_commands',
    'register_study_commands',
]
