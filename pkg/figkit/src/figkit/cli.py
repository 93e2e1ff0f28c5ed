"""figures: render plots from trajectory CSV exports.

Usage:
    figures objective <trajectory.csv> <out.png>
    figures bloch <trajectory.csv> <out.png>

Exit codes: 0 on success, 2 on a malformed or unsuitable CSV.
"""

from __future__ import annotations

import argparse
import sys

from .plots import plot_bloch, plot_objective
from .table import TableError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figures", description="Render figures from trajectory CSVs.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func, doc in (
            ("objective", plot_objective, "two-panel objective-vs-time plot"),
            ("bloch", plot_bloch, "3-D Bloch-sphere trajectory")):
        p = sub.add_parser(name, help=doc)
        p.add_argument("csv")
        p.add_argument("png")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args.csv, args.png)
    except TableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
