#!/usr/bin/env python3
"""Dump the four bundled scenario datasets to CSV files under out/.

Each file is exactly what `abxs eval --fig N` prints; plot them with any
external tool (the x column is the second-to-last label column's sweep).
"""

import contextlib
import io
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from abxs import cli  # noqa: E402

OUT = pathlib.Path(__file__).resolve().parent.parent / "out"

RUNS = {
    "fig1_pdf.csv": ["eval", "--fig", "1"],
    "fig2_aber.csv": ["eval", "--fig", "2", "--oracle"],
    "fig3_aber_vs_alpha.csv": ["eval", "--fig", "3"],
    "fig4_capacity.csv": ["eval", "--fig", "4", "--oracle"],
}


def main() -> int:
    OUT.mkdir(exist_ok=True)
    for name, argv in RUNS.items():
        buf = io.StringIO()
        with contextlib.redirect_stdout(buf):
            rc = cli.main(argv)
        if rc != 0:
            print(f"{name}: FAILED (exit {rc})", file=sys.stderr)
            return rc
        path = OUT / name
        path.write_text(buf.getvalue(), encoding="utf-8")
        rows = buf.getvalue().count("\n") - 1
        print(f"wrote {path} ({rows} rows)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
