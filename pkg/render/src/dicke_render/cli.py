"""CLI: render --kind <kind> --in <files> --out <png/svg>."""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .figures import KINDS, FigureSpec, render
from .io import SchemaError


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="render", description="Render dicke-chaos data files into figures."
    )
    p.add_argument("--version", action="version", version=f"dicke-render {__version__}")
    p.add_argument("--kind", required=True, choices=sorted(KINDS))
    p.add_argument(
        "--in",
        dest="inputs",
        required=True,
        nargs="+",
        metavar="FILE",
        help="input CSV/JSON file(s) produced by the dicke CLI",
    )
    p.add_argument("--out", required=True, help="output image path (.png or .svg)")
    p.add_argument("--title", default="")
    p.add_argument("--value-label", default=None, help="colorbar label for heatmaps")
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    labels = {}
    if args.value_label:
        labels["value"] = args.value_label
    spec = FigureSpec(
        kind=args.kind, inputs=args.inputs, out=args.out, title=args.title, labels=labels
    )
    try:
        out = render(spec)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
