#!/usr/bin/env python3
"""Backward compatibility wrapper for src.cli.app"""
from src.cli.app import launch

if __name__ == "__main__":
    launch()
