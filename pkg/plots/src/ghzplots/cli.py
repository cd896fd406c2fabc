"""Figure-rendering command line: render <figure-id> <input.csv> <output>.

Exit codes: 0 success, 1 schema/column/figure-id error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import sys

from .render import FIGURE_IDS, FigureSpec, render
from .schema import SchemaError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ghzfreq-render",
        description="Render one figure from a ghzfreq schema=1 CSV file.")
    parser.add_argument("figure_id", metavar="figure-id",
                        help=f"one of: {', '.join(FIGURE_IDS)}")
    parser.add_argument("input_csv", metavar="input.csv")
    parser.add_argument("output_image", metavar="output-image")
    parser.add_argument("--log-x", action=argparse.BooleanOptionalAction,
                        default=None, help="override the default x scale")
    parser.add_argument("--log-y", action=argparse.BooleanOptionalAction,
                        default=None, help="override the default y scale")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(figure_id=args.figure_id, input_csv=args.input_csv,
                      output_image=args.output_image,
                      log_x=args.log_x, log_y=args.log_y)
    try:
        render(spec)
    except SchemaError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except OSError as exc:
        sys.stderr.write(f"i/o error: {exc}\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
