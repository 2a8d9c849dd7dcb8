"""Finite elements on the unit-square grid: stiffness, assembly, solve.

Every element is a bilinear four-node square in plane stress, so a single
8x8 matrix ``k0`` serves the whole mesh; per-element stiffness only scales
it.  The global matrix is never densified: elements emit 64 COO triplets
each, triplets touching a fixed DOF are dropped, and the survivors are
renumbered so the free DOFs occupy a compact index range.
"""

import numpy as np

from . import material, sparse


def element_stiffness(e, nu):
    """8x8 stiffness of one unit square element (plane stress)."""
    k = np.array([
        1 / 2 - nu / 6, 1 / 8 + nu / 8, -1 / 4 - nu / 12, -1 / 8 + 3 * nu / 8,
        -1 / 4 + nu / 12, -1 / 8 - nu / 8, nu / 6, 1 / 8 - 3 * nu / 8,
    ])
    return e / (1 - nu ** 2) * np.array([
        [k[0], k[1], k[2], k[3], k[4], k[5], k[6], k[7]],
        [k[1], k[0], k[7], k[6], k[5], k[4], k[3], k[2]],
        [k[2], k[7], k[0], k[5], k[6], k[3], k[4], k[1]],
        [k[3], k[6], k[5], k[0], k[7], k[2], k[1], k[4]],
        [k[4], k[5], k[6], k[7], k[0], k[1], k[2], k[3]],
        [k[5], k[4], k[3], k[2], k[1], k[0], k[7], k[6]],
        [k[6], k[3], k[4], k[1], k[2], k[7], k[0], k[5]],
        [k[7], k[2], k[1], k[4], k[3], k[6], k[5], k[0]],
    ])


def element_dof_map(nelx, nely):
    """Per-element DOF ids, one row of 8 per element.

    Elements are traversed column-major (element (elx, ely) is row
    elx * nely + ely).  Corner nodes are taken top-left, top-right,
    bottom-right, bottom-left, with the horizontal DOF before the vertical
    at each corner.
    """
    elx, ely = np.meshgrid(np.arange(nelx), np.arange(nely), indexing="ij")
    elx, ely = elx.ravel(), ely.ravel()
    n1 = (nely + 1) * elx + ely            # top-left
    n2 = (nely + 1) * (elx + 1) + ely      # top-right
    n3 = (nely + 1) * (elx + 1) + ely + 1  # bottom-right
    n4 = (nely + 1) * elx + ely + 1        # bottom-left
    return np.stack(
        [2 * n1, 2 * n1 + 1, 2 * n2, 2 * n2 + 1,
         2 * n3, 2 * n3 + 1, 2 * n4, 2 * n4 + 1],
        axis=1,
    )


def inverse_permutation(ixs):
    """Inverse of a permutation of 0..len-1: inverse[ixs[k]] = k."""
    ixs = np.asarray(ixs, dtype=np.int64).ravel()
    if ixs.size and not (0 <= ixs.min() and ixs.max() < ixs.size):
        raise ValueError("input is not a permutation of 0..len-1")
    inverse = np.full(ixs.size, -1, dtype=np.int64)
    inverse[ixs] = np.arange(ixs.size, dtype=np.int64)
    if np.any(inverse < 0):
        raise ValueError("input is not a permutation of 0..len-1")
    return inverse


def _element_triplets(x_phys, k0, model):
    """All 64 * nelx * nely stiffness triplets, element-major, unreduced."""
    nely, nelx = x_phys.shape
    edof = element_dof_map(nelx, nely)
    rows = np.repeat(edof, 8, axis=1).ravel()
    cols = np.tile(edof, (1, 8)).ravel()
    # x_phys is (nely, nelx); transpose so flattening follows element order.
    scale = material.young_modulus(x_phys, model).T.ravel()
    values = (scale[:, None] * k0.ravel()[None, :]).ravel()
    return values, rows, cols


def _free_reduction(rows, cols, spec):
    """Triplet filter keeping free-DOF pairs, plus the compacting renumbering."""
    member = np.zeros(spec.ndof, dtype=bool)
    member[spec.freedofs] = True
    keep = member[rows] & member[cols]
    index_map = inverse_permutation(np.concatenate([spec.freedofs, spec.fixdofs]))
    return keep, index_map


def assemble_k(x_phys, k0, model, spec):
    """Reduced global stiffness over the free DOFs, as a CooMatrix."""
    values, rows, cols = _element_triplets(x_phys, k0, model)
    keep, index_map = _free_reduction(rows, cols, spec)
    return sparse.CooMatrix(
        entries=values[keep],
        rows=index_map[rows[keep]],
        cols=index_map[cols[keep]],
        size=spec.freedofs.size,
    )


def scatter_displacements(u_free, spec):
    """Full-length displacement vector: solved values plus zeros at supports."""
    u_values = np.concatenate([u_free, np.zeros(spec.fixdofs.size)])
    index_map = inverse_permutation(np.concatenate([spec.freedofs, spec.fixdofs]))
    return u_values[index_map]


def displace(x_phys, k0, spec, model):
    """Nodal displacements of design ``x_phys`` under the problem loads."""
    kmat = assemble_k(x_phys, k0, model, spec)
    try:
        u_free = sparse.solve_coo(kmat, spec.forces[spec.freedofs])
    except sparse.NumericalError as exc:
        raise sparse.NumericalError(
            "displacement solve failed; the structure is likely a mechanism "
            f"(insufficient supports): {exc}") from exc
    return scatter_displacements(u_free, spec)


def element_strain_energy(u, k0, nelx, nely):
    """Per-element quadratic form u_e' k0 u_e (no stiffness scaling)."""
    ue = u[element_dof_map(nelx, nely)]
    return np.einsum("ea,ab,eb->e", ue, k0, ue)


def compliance(x_phys, u, k0, model):
    """Total work of the loads: sum over elements of E(x_e) u_e' k0 u_e."""
    nely, nelx = x_phys.shape
    ce = element_strain_energy(u, k0, nelx, nely)
    return float(material.young_modulus(x_phys, model).T.ravel() @ ce)
