"""Command line: render one benchmark figure from a results directory.

Usage: isingpt-plot <kind> --in <dir> [--out <file>] [--title <text>]
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import FIGURE_KINDS, FigureSpec, PlotError, render


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="isingpt-plot", description=__doc__.splitlines()[0])
    parser.add_argument("kind", choices=FIGURE_KINDS)
    parser.add_argument("--in", dest="input_dir", required=True,
                        help="directory with the benchmark CSV outputs")
    parser.add_argument("--out", help="output image path "
                                      "(default: <in>/<kind>.png)")
    parser.add_argument("--title", help="figure title override")
    parser.add_argument("--xlabel", help="x axis label override")
    parser.add_argument("--ylabel", help="y axis label override")
    parser.add_argument("--burn-in", type=float, default=0.5,
                        help="burn-in fraction for magnetization_curve")
    ns = parser.parse_args(argv)

    out = Path(ns.out) if ns.out else Path(ns.input_dir) / f"{ns.kind}.png"
    spec = FigureSpec(kind=ns.kind, input_dir=Path(ns.input_dir), output=out,
                      title=ns.title, xlabel=ns.xlabel, ylabel=ns.ylabel,
                      burn_in_fraction=ns.burn_in)
    try:
        result = render(spec)
    except PlotError as exc:
        print(f"isingpt-plot: error: {exc}", file=sys.stderr)
        return 1
    print(result.path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
