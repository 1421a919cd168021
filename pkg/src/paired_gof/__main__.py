"""Entry-point: python -m paired_gof"""
from __future__ import annotations

import sys

from paired_gof.cli import main

if __name__ == "__main__":
    sys.exit(main())
