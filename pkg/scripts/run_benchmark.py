#!/usr/bin/env python3
"""Closed form vs quadrature timing sweep (the `abxs benchmark` subcommand).

Both routes are tuned to a matched 1% accuracy target; the report lists the
median per-point wall time on this machine and the speedup ratio. Numbers are
hardware-dependent and informational.
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from abxs import cli  # noqa: E402

if __name__ == "__main__":
    sys.exit(cli.main(["benchmark", "--repeats", "5"] + sys.argv[1:]))
