"""Figure CLI:  plot <figure-kind> --in DIR --out FILE [--bins N]

Renders one figure from the artifacts of a finished experiment run.
Exit codes: 0 on success, 2 on missing/mismatched artifacts or bad usage.
"""

from __future__ import annotations

import argparse
import sys

from .artifacts import MissingArtifact, SchemaMismatch
from .figures import KINDS, FigureSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plot",
                                     description="render figures from run artifacts")
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("--in", dest="run_dir", required=True,
                        help="run directory containing summary.json and CSV artifacts")
    parser.add_argument("--out", dest="out_path", required=True,
                        help="output image file")
    parser.add_argument("--bins", type=int, default=None,
                        help="rebin the heatmap to this many bins (must divide)")
    parser.add_argument("--input", default=None,
                        help="override the default CSV filename inside the run dir")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    style = {}
    if args.input:
        style["input"] = args.input
    spec = FigureSpec(kind=args.kind, run_dir=args.run_dir, out_path=args.out_path,
                      bins=args.bins, style=style)
    try:
        out = render(spec)
    except (MissingArtifact, SchemaMismatch) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
