"""Define a problem of your own: supports, loads, a masked-off region.

Builds a bracket: clamped along the left edge, loaded at the bottom-right
corner, with a rectangular hole in the middle of the domain that the design
is not allowed to use.  Shows both ways of constructing a problem -- directly
through arrays, and through a JSON problem file that the CLI can run too.

    python3 demos/custom_problem.py
"""

import pathlib

import numpy as np

from densitop import mma, problem, runner
from densitop.problem import X, Y


def build_bracket(width=48, height=32):
    # Per-node arrays, shape (width+1, height+1, 2).  normals marks pinned
    # DOFs, forces carries the applied load per DOF.
    normals = np.zeros((width + 1, height + 1, 2))
    normals[0, :, X] = 1  # clamp the whole left edge
    normals[0, :, Y] = 1

    forces = np.zeros((width + 1, height + 1, 2))
    forces[-1, -1, Y] = -1.0  # pull down on the bottom-right corner

    # The mask is per element, (height, width); 0 removes a cell entirely.
    mask = np.ones((height, width))
    mask[12:20, 18:30] = 0.0

    return problem.problem_from_normals(
        normals, forces, mask=mask, density=0.35, opt_steps=40)


def main():
    spec = build_bracket()
    print(f"bracket: {spec.nelx} x {spec.nely} elements, "
          f"{int((spec.mask == 0).sum())} masked out")

    losses, x_final, _ = mma.optimize(spec)
    print(f"compliance {losses[0]:.1f} -> {losses[-1]:.1f} "
          f"over {len(losses) - 1} steps")

    out = pathlib.Path(__file__).parent
    runner.write_pgm(out / "bracket.pgm", runner.render_density(x_final))
    print(f"wrote {out / 'bracket.pgm'} (the hole stays empty)")

    # The same geometry as a problem file.  Anything the file format covers
    # round-trips: densitop run --problem demos/bracket.json works as well.
    path = out / "bracket.json"
    problem.save_problem(spec, path)
    reloaded = problem.load_problem(path)
    assert reloaded.nelx == spec.nelx and reloaded.density == spec.density
    print(f"wrote {path}; try: densitop run --problem {path} --out bracket_out")


if __name__ == "__main__":
    main()
