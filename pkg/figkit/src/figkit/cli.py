"""Batch figure regeneration: figkit --csv-dir RESULTS --out FIGURES."""

from __future__ import annotations

import argparse
import sys

from .figures import make_figures
from .loading import MissingInputError, SchemaError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figkit",
        description="regenerate benchmark figures from experiment CSVs",
    )
    parser.add_argument("--csv-dir", required=True,
                        help="directory searched recursively for CSV outputs")
    parser.add_argument("--out", required=True,
                        help="directory for the rendered SVG files")
    parser.add_argument("--only", default=None,
                        help="comma list of figures, e.g. fig1,fig5")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    only = args.only.split(",") if args.only else None
    try:
        paths = make_figures(args.csv_dir, args.out, only=only)
    except (MissingInputError, SchemaError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for path in paths:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
