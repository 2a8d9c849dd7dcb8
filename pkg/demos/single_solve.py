"""One finite element solve, taken apart.

Builds the stiffness system for a uniform half-beam design by hand, solves
it, and checks the physics bookkeeping: supports do not move, the loaded
node sinks, compliance equals the work of the loads, and denser material
deflects less.

    python3 demos/single_solve.py
"""

import numpy as np

from densitop import fem, material, problem, sparse


def main():
    spec = problem.mbb_beam(20, 10)
    k0 = fem.element_stiffness(spec.young, spec.poisson)
    model = material.from_spec(spec)

    print(f"element stiffness: 8x8, symmetric, "
          f"k0[0,0] = {k0[0, 0]:.6f}")

    for density in (0.3, 0.6, 1.0):
        x_phys = np.full((spec.nely, spec.nelx), density)

        # displace() wraps these three steps; spelled out here to show them.
        kmat = fem.assemble_k(x_phys, k0, model, spec)
        u_free = sparse.solve_coo(kmat, spec.forces[spec.freedofs])
        u = fem.scatter_displacements(u_free, spec)

        assert np.all(u[spec.fixdofs] == 0.0), "supports moved"
        c = fem.compliance(x_phys, u, k0, model)
        work = spec.forces @ u
        tip = u[1]  # vertical DOF of the loaded top-left node
        print(f"density {density:.1f}: loaded node sinks {-tip:8.2f}, "
              f"compliance {c:8.2f}, F.U {work:8.2f}")

    print("compliance equals the work of the loads, and more material "
          "means a stiffer (less compliant) structure")


if __name__ == "__main__":
    main()
