"""Entry point for running as a module.

Usage:
    python -m soapfilm solve instance.txt --svg tree.svg
"""

import sys

from soapfilm.interface.cli import main

if __name__ == "__main__":
    sys.exit(main())
