"""Command line: `plots --kind K --inputs DIR... --out FILE [--format png|svg]`."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import FORMATS, KINDS, PlotInputError, PlotSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plots", description="Render figures from simulator run directories."
    )
    parser.add_argument("--kind", choices=KINDS, required=True)
    parser.add_argument(
        "--inputs", nargs="+", type=Path, required=True, help="run directories (one per curve/panel)"
    )
    parser.add_argument("--out", type=Path, required=True, help="output image path")
    parser.add_argument("--format", choices=FORMATS, default=None, help="image format (default: from --out suffix, else png)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    image_format = args.format or (args.out.suffix.lstrip(".") or "png")
    if image_format not in FORMATS:
        print(f"error: unsupported image format {image_format!r}", file=sys.stderr)
        return 2
    try:
        image, sidecar = render(
            PlotSpec(kind=args.kind, inputs=tuple(args.inputs), out=args.out, image_format=image_format)
        )
    except PlotInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {image} and {sidecar}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
