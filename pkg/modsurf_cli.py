#!/usr/bin/env python3
"""Compatibility launcher for modsurf.cli."""

from modsurf.cli import main

if __name__ == "__main__":
    raise SystemExit(main())
