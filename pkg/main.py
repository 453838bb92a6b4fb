#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
efgrid - Main Entry Point
Cross-source entity-feature index over key-value, wide-column, document and graph data.
"""

from src.core.cli import run_cli


if __name__ == "__main__":
    run_cli()
