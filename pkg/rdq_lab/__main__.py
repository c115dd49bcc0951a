"""Allow running as ``python -m rdq_lab``."""

import sys

from rdq_lab.cli import main

if __name__ == "__main__":
    sys.exit(main())
