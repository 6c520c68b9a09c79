#!/usr/bin/env python3
"""
Main Entry Point for the OverHear Toolkit
"""

from src.cli.app import launch


def main():
    """Launch the OverHear command line interface."""
    launch()


if __name__ == "__main__":
    main()
