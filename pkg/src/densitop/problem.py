"""Design domains: grid indexing, supports, loads, presets, and problem files.

A domain is a regular grid of unit square elements, ``nelx`` columns wide and
``nely`` rows tall.  Mesh nodes are numbered column by column starting at the
top-left corner, so node ``(i, j)`` has id ``(nely + 1) * i + j``.  Each node
carries two degrees of freedom, horizontal first: DOF ``2 * id`` and
``2 * id + 1``.  Supports pin DOFs to zero displacement; loads assign force
values per DOF (the canonical beam load is ``-1`` on a vertical DOF).
"""

import dataclasses
import json

import numpy as np

# Axis codes used throughout: index 0 is horizontal, 1 is vertical.
X, Y = 0, 1


class ValidationError(ValueError):
    """A problem definition violates one of its invariants."""


def dof_index(i, j, axis, *, nelx, nely):
    """Flat DOF id of node ``(i, j)`` along ``axis`` (0 horizontal, 1 vertical)."""
    if not (0 <= i <= nelx and 0 <= j <= nely):
        raise ValidationError(
            f"node ({i}, {j}) outside the node grid [0, {nelx}] x [0, {nely}]")
    if axis not in (0, 1):
        raise ValidationError(f"axis must be 0 (horizontal) or 1 (vertical), got {axis!r}")
    return 2 * ((nely + 1) * i + j) + axis


@dataclasses.dataclass(eq=False)
class ProblemSpec:
    """Complete description of one compliance-minimization problem.

    Attributes:
      nelx, nely: grid size in elements (columns, rows).
      forces: flat load vector, one entry per DOF (length 2*(nelx+1)*(nely+1)).
        Entries on fixed DOFs are allowed but ignored by the solve.
      fixdofs: sorted ids of DOFs pinned to zero displacement.
      freedofs: sorted complement of fixdofs; derived automatically if omitted.
      density: target volume fraction, strictly inside (0, 1).
      penal: stiffness penalization exponent.
      filter_width: standard deviation of the density smoothing, in elements.
      young, young_min: solid stiffness and the tiny void floor.
      poisson: Poisson coefficient of the material.
      xmin, xmax: clamp bounds for densities where a strictly positive floor
        is needed.
      mask: scalar 1, or a (nely, nelx) array with 0 marking cells excluded
        from the design.
      opt_steps: optimizer step budget.
      print_every: progress reporting cadence, in objective evaluations.
    """

    nelx: int
    nely: int
    forces: np.ndarray
    fixdofs: np.ndarray
    freedofs: np.ndarray = None
    density: float = 0.4
    penal: float = 3.0
    filter_width: float = 1.0
    young: float = 1.0
    young_min: float = 1e-9
    poisson: float = 0.3
    xmin: float = 0.001
    xmax: float = 1.0
    mask: object = 1.0
    opt_steps: int = 80
    print_every: int = 10

    def __post_init__(self):
        self.nelx = int(self.nelx)
        self.nely = int(self.nely)
        if self.nelx < 1 or self.nely < 1:
            raise ValidationError("grid must be at least 1 x 1 elements")
        ndof = self.ndof

        self.forces = np.asarray(self.forces, dtype=np.float64).ravel()
        if self.forces.shape != (ndof,):
            raise ValidationError(
                f"forces length mismatch: expected {ndof} entries, got {self.forces.size}")

        self.fixdofs = np.unique(np.asarray(self.fixdofs, dtype=np.int64).ravel())
        if self.fixdofs.size and not (0 <= self.fixdofs[0] and self.fixdofs[-1] < ndof):
            raise ValidationError("fixdofs contain ids outside the DOF range")
        complement = np.setdiff1d(np.arange(ndof, dtype=np.int64), self.fixdofs)
        if self.freedofs is None:
            self.freedofs = complement
        else:
            self.freedofs = np.sort(np.asarray(self.freedofs, dtype=np.int64).ravel())
            if not np.array_equal(self.freedofs, complement):
                raise ValidationError("freedofs and fixdofs must partition the DOF range")
        if self.freedofs.size == 0:
            raise ValidationError("no free DOFs: every displacement is pinned")

        if not 0.0 < self.density < 1.0:
            raise ValidationError(f"density out of (0,1): {self.density}")
        if not 0.0 < self.young_min < self.young:
            raise ValidationError("stiffness bounds require 0 < young_min < young")
        if not 0.0 <= self.poisson < 0.5:
            raise ValidationError(f"poisson coefficient out of [0, 0.5): {self.poisson}")
        if self.penal < 1.0:
            raise ValidationError(f"penal must be at least 1, got {self.penal}")
        if not self.filter_width > 0.0:
            raise ValidationError(f"filter_width must be positive, got {self.filter_width}")
        if not self.xmin < self.xmax:
            raise ValidationError("xmin must be below xmax")

        mask = np.asarray(self.mask, dtype=np.float64)
        if mask.ndim == 0:
            self.mask = float(mask)
        elif mask.shape != (self.nely, self.nelx):
            raise ValidationError(
                f"mask shape mismatch: expected {(self.nely, self.nelx)}, got {mask.shape}")
        else:
            self.mask = mask
        if np.mean(self.mask) == 0.0:
            raise ValidationError("mask excludes every cell")

        self.opt_steps = int(self.opt_steps)
        self.print_every = int(self.print_every)
        if self.opt_steps < 1:
            raise ValidationError("opt_steps must be at least 1")
        if self.print_every < 1:
            raise ValidationError("print_every must be at least 1")

    @property
    def ndof(self):
        """Total DOF count, fixed and free together."""
        return 2 * (self.nelx + 1) * (self.nely + 1)


def problem_from_normals(normals, forces, **params):
    """Build a ProblemSpec from dense per-node support/load arrays.

    Both arrays have shape ``(nelx + 1, nely + 1, 2)``.  ``normals`` is
    nonzero where a DOF is pinned; ``forces`` holds the applied load per DOF.
    Flattening in (column, row, axis) order is exactly the dof_index order.
    """
    normals = np.asarray(normals)
    forces = np.asarray(forces, dtype=np.float64)
    if normals.ndim != 3 or normals.shape[2] != 2 or normals.shape != forces.shape:
        raise ValidationError("normals and forces must share shape (nelx+1, nely+1, 2)")
    nelx, nely = normals.shape[0] - 1, normals.shape[1] - 1
    return ProblemSpec(
        nelx=nelx,
        nely=nely,
        forces=forces.ravel(),
        fixdofs=np.flatnonzero(normals.ravel()),
        **params,
    )


def mbb_beam(width=80, height=25, density=0.4, **params):
    """Half of a simply supported beam with a midspan load (the textbook case).

    The left edge is the symmetry plane (horizontal DOFs pinned), the
    bottom-right corner rests on a roller, and a unit load presses down on the
    top-left node.
    """
    normals = np.zeros((width + 1, height + 1, 2))
    normals[-1, -1, Y] = 1
    normals[0, :, X] = 1
    forces = np.zeros((width + 1, height + 1, 2))
    forces[0, 0, Y] = -1
    return problem_from_normals(normals, forces, density=density, **params)


def cantilever_beam(width=60, height=20, density=0.4, **params):
    """Beam clamped along its whole left edge, loaded at mid-height of the tip.

    An extra ready-made geometry, not part of the textbook benchmark.
    """
    normals = np.zeros((width + 1, height + 1, 2))
    normals[0, :, :] = 1
    forces = np.zeros((width + 1, height + 1, 2))
    forces[-1, round(height / 2), Y] = -1
    return problem_from_normals(normals, forces, density=density, **params)


def causeway_bridge(width=60, height=20, density=0.3, **params):
    """Bridge span carrying a uniform deck load along its top edge.

    An extra ready-made geometry, not part of the textbook benchmark.  Both
    vertical edges are symmetry planes and the bottom-right corner is a
    roller, so the domain models one repeating bay of a long causeway.
    """
    normals = np.zeros((width + 1, height + 1, 2))
    normals[-1, -1, Y] = 1
    normals[-1, :, X] = 1
    normals[0, :, X] = 1
    forces = np.zeros((width + 1, height + 1, 2))
    forces[:, 0, Y] = -1 / width
    return problem_from_normals(normals, forces, density=density, **params)


PRESETS = {
    "mbb": mbb_beam,
    "cantilever": cantilever_beam,
    "bridge": causeway_bridge,
}

_SCALAR_KEYS = {"density": float, "penal": float, "filter_width": float, "opt_steps": int}
_KNOWN_KEYS = {"width", "height", "preset", "fixed", "loads", "mask", *_SCALAR_KEYS}


def load_problem(path):
    """Read a JSON problem file into a ProblemSpec.

    See the README for the document format.  Raises ValidationError with the
    offending file, field, or entry named in the message.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON: {exc}") from exc
    except OSError as exc:
        raise ValidationError(f"{path}: {exc.strerror or exc}") from exc
    try:
        return problem_from_dict(data)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from exc


def problem_from_dict(data):
    """Build a ProblemSpec from an already-parsed problem document."""
    if not isinstance(data, dict):
        raise ValidationError("problem document must be a JSON object")
    unknown = sorted(set(data) - _KNOWN_KEYS)
    if unknown:
        raise ValidationError(f"unknown field '{unknown[0]}'")

    scalars = {key: conv(data[key]) for key, conv in _SCALAR_KEYS.items() if key in data}

    if "preset" in data:
        # A preset supplies the geometry; fixed/loads/mask keys are overridden.
        name = data["preset"]
        if name not in PRESETS:
            raise ValidationError(
                f"unknown preset '{name}' (available: {', '.join(sorted(PRESETS))})")
        size = {}
        if "width" in data:
            size["width"] = int(data["width"])
        if "height" in data:
            size["height"] = int(data["height"])
        return PRESETS[name](**size, **scalars)

    for key in ("width", "height"):
        if key not in data:
            raise ValidationError(f"missing field '{key}'")
    width, height = int(data["width"]), int(data["height"])
    if width < 1 or height < 1:
        raise ValidationError("width and height must be positive")

    normals = np.zeros((width + 1, height + 1, 2))
    for entry in data.get("fixed", []):
        i, j, axis = _node_entry(entry, 3, "fixed", width, height)
        normals[i, j, axis] = 1

    forces = np.zeros((width + 1, height + 1, 2))
    for entry in data.get("loads", []):
        i, j, axis = _node_entry(entry, 4, "loads", width, height)
        forces[i, j, axis] += float(entry[3])

    mask = 1.0
    if "mask" in data:
        mask = np.ones((height, width))
        for entry in data["mask"]:
            try:
                i_elem, j_elem = (int(v) for v in entry)
            except (TypeError, ValueError) as exc:
                raise ValidationError(
                    f"mask entry {entry!r} is not an [i_elem, j_elem] pair") from exc
            if not (0 <= i_elem < width and 0 <= j_elem < height):
                raise ValidationError(f"mask entry {entry!r} outside the element grid")
            mask[j_elem, i_elem] = 0.0

    return ProblemSpec(
        nelx=width,
        nely=height,
        forces=forces.ravel(),
        fixdofs=np.flatnonzero(normals.ravel()),
        mask=mask,
        **scalars,
    )


def _node_entry(entry, length, field, width, height):
    names = {3: "[i, j, axis]", 4: "[i, j, axis, value]"}
    try:
        if len(entry) != length:
            raise ValueError
        i, j, axis = int(entry[0]), int(entry[1]), int(entry[2])
    except (TypeError, ValueError) as exc:
        raise ValidationError(
            f"{field} entry {entry!r} is not an {names[length]} entry") from exc
    if not (0 <= i <= width and 0 <= j <= height):
        raise ValidationError(f"{field} entry {entry!r} outside the node grid")
    if axis not in (0, 1):
        raise ValidationError(f"{field} entry {entry!r} has axis outside {{0, 1}}")
    return i, j, axis


def save_problem(spec, path):
    """Write ``spec`` as a JSON problem file.

    Supports and loads are stored as sparse per-node entries.  Material
    constants outside the file format (young, poisson, ...) are not stored
    and revert to defaults on reload.
    """
    nodes_per_col = spec.nely + 1

    def node_entry(dof):
        node, axis = divmod(int(dof), 2)
        i, j = divmod(node, nodes_per_col)
        return i, j, axis

    doc = {
        "width": spec.nelx,
        "height": spec.nely,
        "density": spec.density,
        "penal": spec.penal,
        "filter_width": spec.filter_width,
        "opt_steps": spec.opt_steps,
        "fixed": [list(node_entry(dof)) for dof in spec.fixdofs],
        "loads": [
            [*node_entry(dof), float(spec.forces[dof])]
            for dof in np.flatnonzero(spec.forces)
        ],
    }
    if isinstance(spec.mask, np.ndarray):
        doc["mask"] = [[int(i), int(j)] for j, i in np.argwhere(spec.mask == 0.0)]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
