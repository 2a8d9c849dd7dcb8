"""Convince yourself the analytic gradient is right.

The optimizer leans entirely on the adjoint gradient of compliance, so this
script stress-tests it three ways on a small random design:

  1. against central finite differences, component by component;
  2. the no-extra-solve shortcut against the generic reverse-mode path
     through the sparse solve (they are algebraically identical for a
     symmetric stiffness matrix);
  3. the volume gradient against finite differences of the mean density.

    python3 demos/gradient_check.py
"""

import numpy as np

from densitop import filters, objective, problem


def finite_difference(f, x, h=1e-6):
    grad = np.zeros_like(x)
    for idx in np.ndindex(x.shape):
        bumped = x.copy()
        bumped[idx] = x[idx] + h
        up = f(bumped)
        bumped[idx] = x[idx] - h
        down = f(bumped)
        grad[idx] = (up - down) / (2.0 * h)
    return grad


def main():
    rng = np.random.default_rng(0)
    spec = problem.mbb_beam(8, 5)
    x = rng.uniform(0.25, 0.75, size=(5, 8))

    report = objective.gradient(x, spec)
    fd = finite_difference(lambda v: objective.evaluate(v, spec), x)
    worst = np.max(np.abs(report.grad - fd) / np.maximum(np.abs(fd), 1e-8))
    print(f"adjoint vs finite differences ({x.size} components): "
          f"worst relative error {worst:.2e}")

    slow = objective.gradient(x, spec, via_solve_adjoint=True)
    gap = np.max(np.abs(slow.grad - report.grad)) / np.max(np.abs(report.grad))
    print(f"shortcut vs generic solve-adjoint path: relative gap {gap:.2e}")

    vg = objective.volume_gradient(spec)
    vg_fd = finite_difference(lambda v: filters.mean_density(v, spec), x)
    print(f"volume gradient vs finite differences: worst gap "
          f"{np.max(np.abs(vg - vg_fd)):.2e}")


if __name__ == "__main__":
    main()
