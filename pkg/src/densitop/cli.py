"""Command line front end.

Thread pinning has to happen before the numerical libraries load, so this
module imports only the standard library at the top and defers the package
imports until after the environment is set up.
"""

import argparse
import os
import sys

_THREAD_VARS = (
    "OMP_NUM_THREADS",
    "OPENBLAS_NUM_THREADS",
    "MKL_NUM_THREADS",
    "NUMEXPR_NUM_THREADS",
)


def apply_thread_cap(environ=os.environ):
    """Propagate DENSITOP_THREADS (default 1) to the BLAS/OpenMP knobs.

    Returns None on success, or an error message for an unusable value.
    Existing explicit settings of the knobs are left alone.
    """
    raw = environ.get("DENSITOP_THREADS", "1")
    try:
        threads = int(raw)
    except ValueError:
        threads = 0
    if threads < 1:
        return f"DENSITOP_THREADS must be a positive integer, got {raw!r}"
    for var in _THREAD_VARS:
        environ.setdefault(var, str(threads))
    return None


def build_parser():
    parser = argparse.ArgumentParser(
        prog="densitop",
        description="Density-based topology optimization on 2D grids.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run_parser = sub.add_parser("run", help="optimize a problem and write the results")
    run_parser.add_argument(
        "--problem", required=True,
        help="preset name (mbb, cantilever, bridge) or path to a problem file")
    run_parser.add_argument("--width", type=int, help="grid width in elements (presets only)")
    run_parser.add_argument("--height", type=int, help="grid height in elements (presets only)")
    run_parser.add_argument("--density", type=float, help="target volume fraction")
    run_parser.add_argument("--steps", type=int, help="optimizer step budget")
    run_parser.add_argument("--filter-width", type=float, dest="filter_width",
                            help="density smoothing radius (standard deviation, elements)")
    run_parser.add_argument("--penal", type=float, help="stiffness penalization exponent")
    run_parser.add_argument("--out", default="out", help="output directory (default: out)")
    run_parser.add_argument("--save-frames", action="store_true",
                            help="write a PGM snapshot per evaluation")
    run_parser.add_argument("--quiet", action="store_true", help="suppress the progress trace")
    return parser


def main(argv=None):
    error = apply_thread_cap()
    if error is not None:
        print(f"error: {error}", file=sys.stderr)
        return 1
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage problems; those are validation errors here
        return 0 if exc.code in (0, None) else 1

    from .runner import RunConfig, run

    cfg = RunConfig(
        problem=args.problem,
        out_dir=args.out,
        width=args.width,
        height=args.height,
        density=args.density,
        steps=args.steps,
        filter_width=args.filter_width,
        penal=args.penal,
        save_frames=args.save_frames,
        quiet=args.quiet,
    )
    return run(cfg)
