#!/usr/bin/env python3
"""
Startup script for the pulse error budget command line.
"""

import os
import sys


def main() -> int:
    """Run the pulse_budget command line."""
    # Add src to path
    src_path = os.path.join(os.path.dirname(os.path.abspath(__file__)), "src")
    sys.path.insert(0, src_path)

    from cli_report import main as cli_main

    return cli_main(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
