"""The compliance objective, its exact gradient, and the volume constraint.

Forward chain: mask and smooth the design, interpolate stiffness, solve for
displacements, sum the element work.  The gradient runs the same chain in
reverse.  Compliance is the work of the loads themselves, so the adjoint
vector of the displacement solve coincides with the displacement field and
the whole gradient costs no extra solve.
"""

import dataclasses

import numpy as np

from . import fem, material, sparse
from .filters import gaussian_filter_adjoint, mean_density, physical_density


@dataclasses.dataclass
class ObjectiveReport:
    """Everything the optimizer needs from one evaluation point."""

    compliance: float
    grad: np.ndarray
    volume: float
    volume_grad: np.ndarray


def evaluate(x, spec, model=None, k0=None, use_filter=True):
    """Compliance of design ``x`` under the problem's loads."""
    model = model if model is not None else material.from_spec(spec)
    k0 = k0 if k0 is not None else fem.element_stiffness(spec.young, spec.poisson)
    x_phys = physical_density(x, spec, use_filter)
    u = fem.displace(x_phys, k0, spec, model)
    return fem.compliance(x_phys, u, k0, model)


def gradient(x, spec, model=None, k0=None, use_filter=True, via_solve_adjoint=False):
    """Objective value and gradients at ``x`` in one pass.

    The reverse chain mirrors the forward stages: per-element sensitivity
    against the smoothed densities, then the smoothing adjoint, then the
    mask.  ``via_solve_adjoint`` replaces the no-extra-solve shortcut with
    the generic reverse rule through the sparse solve (one more solve); the
    two must agree and the flag exists so tests can check that they do.
    """
    model = model if model is not None else material.from_spec(spec)
    k0 = k0 if k0 is not None else fem.element_stiffness(spec.young, spec.poisson)
    x = np.asarray(x, dtype=np.float64).reshape(spec.nely, spec.nelx)
    x_phys = physical_density(x, spec, use_filter)
    u = fem.displace(x_phys, k0, spec, model)
    c = fem.compliance(x_phys, u, k0, model)

    ce = fem.element_strain_energy(u, k0, spec.nelx, spec.nely)
    ce_grid = ce.reshape(spec.nelx, spec.nely).T
    de = material.young_modulus_derivative(x_phys, model)
    if via_solve_adjoint:
        g_phys = _gradient_via_solve_adjoint(x_phys, u, ce_grid, de, k0, spec, model)
    else:
        g_phys = -de * ce_grid
    g = gaussian_filter_adjoint(g_phys, spec.filter_width) if use_filter else g_phys
    g = spec.mask * g

    return ObjectiveReport(
        compliance=c,
        grad=g,
        volume=float(mean_density(x, spec, use_filter)),
        volume_grad=volume_gradient(spec, use_filter),
    )


def constraint(x, spec, use_filter=True):
    """Volume feasibility gap: mean density minus the target; feasible iff <= 0."""
    return float(mean_density(x, spec, use_filter) - spec.density)


def volume_gradient(spec, use_filter=True):
    """Gradient of mean_density; constant because the volume is linear in x."""
    cell = 1.0 / (spec.nelx * spec.nely * np.mean(spec.mask))
    g = np.full((spec.nely, spec.nelx), cell)
    if use_filter:
        g = gaussian_filter_adjoint(g, spec.filter_width)
    return spec.mask * g


def _gradient_via_solve_adjoint(x_phys, u, ce_grid, de, k0, spec, model):
    """Sensitivity of compliance via the generic solve adjoint.

    Compliance depends on x twice: directly through the stiffness scaling of
    the element energies, and through u = solve(K(x), f).  The direct part is
    de * ce.  For the solve part, the cotangent of u is 2 K u; the per-entry
    gradients from the solve adjoint are folded back onto their element via
    each entry's k0 coefficient.  For a symmetric K this total collapses to
    the -de * ce shortcut, which is exactly what callers verify.
    """
    values, rows, cols = fem._element_triplets(x_phys, k0, model)
    keep, index_map = fem._free_reduction(rows, cols, spec)
    kmat = sparse.CooMatrix(
        entries=values[keep],
        rows=index_map[rows[keep]],
        cols=index_map[cols[keep]],
        size=spec.freedofs.size,
    )
    fact = sparse.factorize(kmat)
    u_free = u[spec.freedofs]
    grad_u = 2.0 * (fact.matrix @ u_free)
    entry_grads = sparse.solve_coo_adjoint_entries(kmat, u_free, grad_u, fact)

    n_elems = spec.nelx * spec.nely
    elems = np.repeat(np.arange(n_elems), 64)[keep]
    coeffs = np.tile(k0.ravel(), n_elems)[keep]
    solve_term = np.zeros(n_elems)
    np.add.at(solve_term, elems, entry_grads * coeffs)
    return de * (ce_grid + solve_term.reshape(spec.nelx, spec.nely).T)
