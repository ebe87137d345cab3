#!/usr/bin/env python3
"""Run the full teapot experiment: ingest, validate, repair, tessellate, export.

Usage::

    python scripts/teapot_pipeline.py [--n 16] [--pattern main] [--out out/teapot]

Reads data/teapot.newell relative to the repository root unless --in is given.
"""

import sys
from pathlib import Path

from smartpatch.cli import main

REPO_ROOT = Path(__file__).resolve().parent.parent

if __name__ == "__main__":
    argv = sys.argv[1:]
    if "--in" not in argv:
        argv = ["--in", str(REPO_ROOT / "data" / "teapot.newell"), *argv]
    if "--out" not in argv:
        argv = [*argv, "--out", str(REPO_ROOT / "out" / "teapot")]
    sys.exit(main(["teapot", *argv]))
