"""Utility modules and helpers."""

from .logging_utils import setup_logging, resolve_level

__all__ = [
    'setup_logging',
    'resolve_level',
]
