"""``plot`` command: regenerate figures from solver CSV outputs."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .csvio import PlotInputError
from .figures import FigureId, FigureSpec, plot_convergence, plot_snapshots


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plot", description="Regenerate figures from solver CSV outputs"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_snap = sub.add_parser("snapshots", help="overlay snapshot curves from one run directory")
    p_snap.add_argument("--in", dest="input", required=True, help="run directory")
    p_snap.add_argument("--out", required=True, help="output image path")
    p_snap.add_argument("--png", action="store_true", help="write PNG instead of SVG")
    p_snap.add_argument("--title", default=None)

    p_conv = sub.add_parser("convergence", help="log-log error plot from an errors.csv")
    p_conv.add_argument("--in", dest="input", required=True,
                        help="experiment directory or errors.csv path")
    p_conv.add_argument("--out", required=True, help="output image path")
    p_conv.add_argument("--png", action="store_true", help="write PNG instead of SVG")
    p_conv.add_argument("--group-by", choices=["auto", "m", "delta"], default="auto")
    p_conv.add_argument("--title", default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(
        figure_id=FigureId(args.command),
        inputs=[Path(args.input)],
        output=Path(args.out),
        group_by=getattr(args, "group_by", "auto"),
        title=args.title,
        png=args.png,
    )
    try:
        if spec.figure_id is FigureId.SNAPSHOTS:
            out = plot_snapshots(spec)
        else:
            out = plot_convergence(spec)
    except PlotInputError as exc:
        print(f"plot error: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
