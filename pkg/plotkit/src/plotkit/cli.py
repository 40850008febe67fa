"""Command line: plotkit plot <preset> --in <csv> --out <file>.

Exit codes: 0 success, 2 bad input (schema mismatch, unknown preset,
missing file).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import PRESETS, FigureSpec, render
from .schema import SchemaError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plotkit",
        description="Render simulator summary CSVs into figures")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("plot", help="render one preset figure")
    p.add_argument("preset", choices=PRESETS)
    p.add_argument("--in", dest="input", required=True,
                   help="summary CSV produced by the simulator")
    p.add_argument("--out", dest="output", required=True,
                   help="output image path (vector format by default)")
    p.add_argument("--style", default=None,
                   help="optional matplotlib style file")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    style = {}
    spec = FigureSpec(args.preset, Path(args.input), Path(args.output), style)
    try:
        if args.style:
            import matplotlib.pyplot as plt
            plt.style.use(args.style)
        out = render(spec)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
