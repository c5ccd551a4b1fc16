"""Standalone figure renderer.

Usage:
    sfplots theta --input scan.csv --out fig.svg [--gamma-c SP=0.02 ...]
    sfplots scaling --input scaling.csv --out inset.svg [--no-fit]

Exit codes: 0 success, 1 bad arguments or schema, 2 I/O failure.
"""
from __future__ import annotations

import argparse
import sys

from . import __version__
from .csvio import SchemaError
from .figures import PlotSpec, plot_scaling_loglog, plot_theta_curves


def _guide(text):
    try:
        protocol, value = text.split("=", 1)
        return protocol, float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected PROTOCOL=VALUE, got {text!r}"
        ) from None


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sfplots",
        description="Render theta(gamma) and betweenness-scaling figures "
        "from experiment CSVs.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("theta", help="theta vs gamma comparison figure")
    p.add_argument("--input", action="append", required=True, dest="inputs")
    p.add_argument("--out", required=True)
    p.add_argument("--x-label", default="")
    p.add_argument("--y-label", default="")
    p.add_argument(
        "--gamma-c",
        type=_guide,
        action="append",
        default=[],
        help="vertical guide, e.g. SP=0.021 (repeatable)",
    )

    p = sub.add_parser("scaling", help="log-log B vs N figure with fits")
    p.add_argument("--input", action="append", required=True, dest="inputs")
    p.add_argument("--out", required=True)
    p.add_argument("--x-label", default="")
    p.add_argument("--y-label", default="")
    p.add_argument(
        "--no-fit",
        action="store_true",
        help="scatter only, skip fit lines and slope annotations",
    )

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    spec = PlotSpec(
        inputs=args.inputs,
        output=args.out,
        kind="theta_curves" if args.command == "theta" else "scaling_loglog",
        x_label=args.x_label,
        y_label=args.y_label,
        fit_overlay=not getattr(args, "no_fit", False),
        gamma_c=dict(getattr(args, "gamma_c", [])),
    )
    try:
        if spec.kind == "theta_curves":
            out = plot_theta_curves(spec)
        else:
            out = plot_scaling_loglog(spec)
    except (SchemaError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
