#!/usr/bin/env python3
"""Print the derived cubic-diagonal constraint system and its certification.

Equivalent to ``smartpatch lambda``; pass --json for machine-readable output.
"""

import sys

from smartpatch.cli import main

if __name__ == "__main__":
    sys.exit(main(["lambda", *sys.argv[1:]]))
