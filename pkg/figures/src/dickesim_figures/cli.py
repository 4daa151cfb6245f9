"""Script entry point: figure kind, input glob(s), output path."""
from __future__ import annotations

import argparse
import glob
import sys
from pathlib import Path

from .render import KINDS, EmptyInput, FigureError, FigureSpec, render


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="dickesim-figures",
        description="Render simulation trajectory CSV files into figures.")
    p.add_argument("kind", choices=KINDS)
    p.add_argument("inputs", nargs="+",
                   help="trajectory CSV path(s) or glob pattern(s)")
    p.add_argument("-o", "--output", required=True, type=Path,
                   help="output image path (PNG and SVG are written)")
    p.add_argument("--n", type=int, default=None,
                   help="atom number for the 1/N guide (fractions)")
    p.add_argument("--toff", type=float, default=None,
                   help="cutoff marker position (excitation)")
    p.add_argument("--xlim", type=float, nargs=2, default=None)
    p.add_argument("--ylim", type=float, nargs=2, default=None)
    return p


def expand_inputs(patterns) -> tuple:
    files: list[str] = []
    for pattern in patterns:
        matched = sorted(glob.glob(pattern))
        files.extend(matched if matched else ([pattern] if Path(pattern).exists() else []))
    return tuple(dict.fromkeys(files))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    inputs = expand_inputs(args.inputs)
    try:
        if not inputs:
            raise EmptyInput(f"no files match {args.inputs}")
        spec = FigureSpec(inputs=inputs, kind=args.kind, output=args.output,
                          xlim=tuple(args.xlim) if args.xlim else None,
                          ylim=tuple(args.ylim) if args.ylim else None,
                          n_atoms=args.n, t_off=args.toff)
        _, paths = render(spec)
    except FigureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in paths:
        print(path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
