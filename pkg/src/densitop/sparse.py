"""Sparse systems in coordinate (COO) form and the solves built on them.

The stiffness matrix is assembled as raw (value, row, col) triplets with
duplicates that sum on materialization.  Solves go through a direct
factorization that is kept and reused: the optimizer needs two solves per
step against the same matrix (displacement and adjoint), and factorizing is
most of the runtime.
"""

import dataclasses

import numpy as np
import scipy.io
import scipy.sparse
import scipy.sparse.linalg

# Every solve must meet this relative residual or it is treated as a failure.
RESIDUAL_RTOL = 1e-10


class NumericalError(RuntimeError):
    """A linear solve failed or did not meet the residual contract."""


@dataclasses.dataclass(frozen=True)
class CooMatrix:
    """Square sparse matrix as coordinate triplets; duplicate positions sum."""

    entries: np.ndarray
    rows: np.ndarray
    cols: np.ndarray
    size: int

    def __post_init__(self):
        object.__setattr__(self, "entries", np.asarray(self.entries, dtype=np.float64).ravel())
        object.__setattr__(self, "rows", np.asarray(self.rows, dtype=np.int64).ravel())
        object.__setattr__(self, "cols", np.asarray(self.cols, dtype=np.int64).ravel())
        object.__setattr__(self, "size", int(self.size))
        if not (self.entries.size == self.rows.size == self.cols.size):
            raise ValueError("entries, rows, and cols must have equal lengths")
        if self.size < 1:
            raise ValueError("matrix size must be positive")
        for name, ixs in (("rows", self.rows), ("cols", self.cols)):
            if ixs.size and not (0 <= ixs.min() and ixs.max() < self.size):
                raise ValueError(f"{name} contain indices outside [0, {self.size})")

    @property
    def nnz(self):
        return self.entries.size


def materialize(m):
    """Compressed-column form of ``m`` with duplicates summed."""
    a = scipy.sparse.coo_matrix(
        (m.entries, (m.rows, m.cols)), shape=(m.size, m.size)).tocsc()
    a.sort_indices()
    return a


class Factorization:
    """Direct factorization of a CooMatrix, reusable across right-hand sides."""

    def __init__(self, m):
        self.matrix = materialize(m)
        try:
            self._lu = scipy.sparse.linalg.splu(self.matrix)
        except RuntimeError as exc:  # raised on an exactly singular pivot
            raise NumericalError(f"sparse factorization failed: {exc}") from exc

    def solve(self, b, transpose=False):
        """Solve A u = b (or A^T u = b) to the module residual contract."""
        b = np.asarray(b, dtype=np.float64)
        norm_b = np.linalg.norm(b)
        if norm_b == 0.0:
            return np.zeros_like(b)
        trans = "T" if transpose else "N"
        a = self.matrix.T if transpose else self.matrix
        u = self._lu.solve(b, trans=trans)
        residual = np.linalg.norm(b - a @ u)
        if residual > RESIDUAL_RTOL * norm_b:
            # One sweep of iterative refinement with the existing factors.
            u = u + self._lu.solve(b - a @ u, trans=trans)
            residual = np.linalg.norm(b - a @ u)
        if not np.all(np.isfinite(u)) or residual > RESIDUAL_RTOL * norm_b:
            raise NumericalError(
                f"solve residual {residual / norm_b:.3e} exceeds {RESIDUAL_RTOL:.0e}; "
                "the matrix is singular or too ill-conditioned")
        return u


def factorize(m):
    """Factorization handle for ``m``; raises NumericalError if singular."""
    return Factorization(m)


def solve_coo(m, b, factorization=None):
    """Solve the system held in ``m`` for right-hand side ``b``.

    Pass a Factorization to reuse existing factors.  The result satisfies
    norm(A u - b) <= RESIDUAL_RTOL * norm(b), else NumericalError is raised.
    """
    fact = factorization if factorization is not None else Factorization(m)
    return fact.solve(b)


def solve_coo_adjoint_entries(m, u, grad_u, factorization=None, sym_pos=True):
    """Gradient of a solve's downstream scalar with respect to each triplet.

    Given the forward solution ``u`` of A u = b and the cotangent ``grad_u``
    of the scalar with respect to u, backpropagation through the solve gives
    lambda = A^-T grad_u and d(scalar)/d(entry k) = -lambda[rows[k]] * u[cols[k]].
    With ``sym_pos`` (the stiffness case) the transpose solve is the plain
    solve, so the forward factorization is reused as-is.
    """
    fact = factorization if factorization is not None else Factorization(m)
    lam = fact.solve(np.asarray(grad_u, dtype=np.float64), transpose=not sym_pos)
    u = np.asarray(u, dtype=np.float64)
    return -lam[m.rows] * u[m.cols]


def export_matrix_market(m, path):
    """Write ``m`` (duplicates summed) to a Matrix Market coordinate file."""
    scipy.io.mmwrite(path, materialize(m))
