"""Optimize the classic half-beam benchmark and look at what comes out.

This is the canonical problem in the field: a beam resting on two supports
with a load pressing down at midspan.  Symmetry lets us model only the left
half on an 80x25 grid.  Running the script writes the optimized design as
PGM images next to this file and prints the loss trace.

    python3 demos/optimize_mbb.py
"""

import pathlib
import time

import numpy as np

from densitop import filters, mma, problem, runner


def main():
    spec = problem.mbb_beam(width=80, height=25, density=0.4)
    print(f"grid:            {spec.nelx} x {spec.nely} elements")
    print(f"DOFs:            {spec.ndof} ({spec.fixdofs.size} pinned)")
    print(f"volume budget:   {spec.density:.0%} of the domain")
    print(f"step budget:     {spec.opt_steps}")
    print()

    start = time.perf_counter()

    def progress(step, loss, _x):
        print(f"  step {step:3d}   compliance {loss:10.2f}   "
              f"t={time.perf_counter() - start:5.2f}s")

    losses, x_final, frames = mma.optimize(spec, progress=progress)

    print()
    print(f"compliance fell {losses[0]:.1f} -> {losses[-1]:.1f} "
          f"({1.0 - losses[-1] / losses[0]:.0%} drop)")
    print(f"final volume fraction: {filters.mean_density(x_final, spec):.6f}")
    crisp = np.mean((x_final < 0.1) | (x_final > 0.9))
    print(f"elements pushed to solid or void: {crisp:.1%}")

    out = pathlib.Path(__file__).parent
    runner.write_pgm(out / "mbb_half.pgm", runner.render_density(x_final))
    # Mirror across the symmetry plane to see the whole beam.
    full = np.concatenate([x_final[:, ::-1], x_final], axis=1)
    runner.write_pgm(out / "mbb_full.pgm", runner.render_density(full))
    print(f"wrote {out / 'mbb_half.pgm'} and {out / 'mbb_full.pgm'}")


if __name__ == "__main__":
    main()
