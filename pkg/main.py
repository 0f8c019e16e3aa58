#!/usr/bin/env python3
"""
SDSP-BRM - Entry Point

Satellite downlink scheduling under breakpoint-resume mode.
"""

import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent / "src"))

from sdsp_brm.core.cli import main as cli_main


def main():
    """Main entry point."""
    try:
        sys.exit(cli_main())
    except KeyboardInterrupt:
        print("\nInterrupted", file=sys.stderr)
        sys.exit(130)


if __name__ == "__main__":
    main()
