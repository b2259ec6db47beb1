"""
Run the ising-fluct command line without installing the console script, eg.

    python3 scripts/ising_fluct_cli.py figure fig3 > fig3.csv
"""

import sys

from ising_fluct.cli import main

if __name__ == "__main__":
    sys.exit(main())
