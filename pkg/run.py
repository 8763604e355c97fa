#!/usr/bin/env python3
"""
dualkit - Entry point

Run `python run.py --help` for the subcommands. Artifacts are written to
./output unless --out-dir or DUALKIT_OUTPUT_DIR says otherwise.
"""

import sys
import os

# Add the repository root to the path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from src.cli import main

if __name__ == '__main__':
    sys.exit(main(sys.argv[1:]))
