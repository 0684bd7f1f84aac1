"""Command line entry point.

`hevqe-plots render --in <summary.csv> --kind <kind> --out <path>` writes
<path>.svg and <path>.png (a .svg/.png suffix on --out is treated as the
base name).  Exit codes: 0 rendered, 1 no usable data rows, 2 schema or
usage error (schema failures print the column diff to stderr).
"""

from __future__ import annotations

import argparse
import sys

from .render import KINDS, DataError, PlotJob, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hevqe-plots",
        description="Render experiment summary CSVs as SVG+PNG charts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sp = sub.add_parser("render", help="render one chart from a summary CSV")
    sp.add_argument("--in", dest="input_csv", required=True,
                    help="summary CSV produced by the experiment runner")
    sp.add_argument("--kind", required=True, choices=sorted(KINDS),
                    help="figure kind")
    sp.add_argument("--out", required=True,
                    help="output base path; .svg and .png are emitted")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        svg, png = render(PlotJob(args.input_csv, args.kind, args.out))
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {svg} and {png}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
