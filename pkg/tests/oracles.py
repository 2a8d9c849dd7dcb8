"""Independent reference implementations the tests compare against.

Everything here is deliberately naive: dense matrices, explicit Python
loops, and direct formula transcriptions.  None of it reuses the package's
vectorized code paths, so agreement between the two is meaningful.
"""

import math

import numpy as np

from densitop import material


def gaussian_kernel_1d(width):
    """Normalized 1D Gaussian, truncated at ceil(4 * width) samples."""
    radius = math.ceil(4 * width)
    k = np.arange(-radius, radius + 1, dtype=float)
    w = np.exp(-(k ** 2) / (2.0 * width ** 2))
    return w / w.sum()


def dense_gaussian_filter(x, width):
    """2D blur by explicit edge-duplicating padding and windowed correlation."""
    x = np.asarray(x, dtype=float)
    radius = math.ceil(4 * width)
    w1 = gaussian_kernel_1d(width)
    kernel = np.outer(w1, w1)
    padded = np.pad(x, radius, mode="symmetric")
    out = np.zeros_like(x)
    for r in range(x.shape[0]):
        for c in range(x.shape[1]):
            window = padded[r:r + 2 * radius + 1, c:c + 2 * radius + 1]
            out[r, c] = np.sum(window * kernel)
    return out


def quadrature_element_stiffness(e, nu):
    """Element stiffness derived from first principles.

    Bilinear shape functions on the unit square, plane stress material law,
    integrated with 2x2 Gauss quadrature.  Corner order matches the mesh:
    top-left, top-right, bottom-right, bottom-left, with the row axis
    pointing down.
    """
    d = e / (1 - nu ** 2) * np.array([
        [1.0, nu, 0.0],
        [nu, 1.0, 0.0],
        [0.0, 0.0, (1.0 - nu) / 2.0],
    ])
    corners = [(0, 0), (1, 0), (1, 1), (0, 1)]
    gauss = (0.5 - 0.5 / math.sqrt(3.0), 0.5 + 0.5 / math.sqrt(3.0))
    k = np.zeros((8, 8))
    for xi in gauss:
        for eta in gauss:
            b = np.zeros((3, 8))
            for a, (xa, ya) in enumerate(corners):
                fx = 1.0 - xi if xa == 0 else xi
                fy = 1.0 - eta if ya == 0 else eta
                dfx = -1.0 if xa == 0 else 1.0
                dfy = -1.0 if ya == 0 else 1.0
                b[0, 2 * a] = dfx * fy
                b[1, 2 * a + 1] = fx * dfy
                b[2, 2 * a] = fx * dfy
                b[2, 2 * a + 1] = dfx * fy
            k += 0.25 * b.T @ d @ b
    return k


def dense_stiffness(x_phys, k0, model, spec):
    """Full (unreduced) global stiffness accumulated element by element."""
    n = spec.ndof
    k = np.zeros((n, n))
    for elx in range(spec.nelx):
        for ely in range(spec.nely):
            e_mod = material.young_modulus(x_phys[ely, elx], model)
            n1 = (spec.nely + 1) * elx + ely
            n2 = (spec.nely + 1) * (elx + 1) + ely
            dofs = [2 * n1, 2 * n1 + 1, 2 * n2, 2 * n2 + 1,
                    2 * n2 + 2, 2 * n2 + 3, 2 * n1 + 2, 2 * n1 + 3]
            for a in range(8):
                for b in range(8):
                    k[dofs[a], dofs[b]] += e_mod * k0[a][b]
    return k


def dense_objective(x, spec, use_filter=True):
    """Compliance via dense assembly, row/column deletion, and a dense solve."""
    model = material.from_spec(spec)
    k0 = quadrature_element_stiffness(spec.young, spec.poisson)
    x = np.asarray(x, dtype=float).reshape(spec.nely, spec.nelx)
    x_phys = spec.mask * x
    if use_filter:
        x_phys = dense_gaussian_filter(x_phys, spec.filter_width)
    k = dense_stiffness(x_phys, k0, model, spec)
    free = spec.freedofs
    k_red = k[np.ix_(free, free)]
    u_red = np.linalg.solve(k_red, spec.forces[free])
    return float(u_red @ k_red @ u_red)


def finite_difference_grad(f, x, h):
    """Central differences of a scalar function, one component at a time."""
    x = np.array(x, dtype=float)
    grad = np.zeros_like(x)
    flat, flat_grad = x.ravel(), grad.ravel()
    for idx in range(flat.size):
        orig = flat[idx]
        flat[idx] = orig + h
        up = f(x)
        flat[idx] = orig - h
        down = f(x)
        flat[idx] = orig
        flat_grad[idx] = (up - down) / (2.0 * h)
    return grad


def loop_compliance(x_phys, u, k0, model):
    """Per-element compliance summed with explicit loops."""
    nely, nelx = x_phys.shape
    total = 0.0
    for elx in range(nelx):
        for ely in range(nely):
            n1 = (nely + 1) * elx + ely
            n2 = (nely + 1) * (elx + 1) + ely
            dofs = [2 * n1, 2 * n1 + 1, 2 * n2, 2 * n2 + 1,
                    2 * n2 + 2, 2 * n2 + 3, 2 * n1 + 2, 2 * n1 + 3]
            ue = u[dofs]
            total += material.young_modulus(x_phys[ely, elx], model) * (ue @ k0 @ ue)
    return total
