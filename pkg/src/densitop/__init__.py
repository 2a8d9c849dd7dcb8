"""Density-based topology optimization on regular 2D grids.

Submodules
----------
problem    design domains: grids, supports, loads, presets, problem files
material   density-to-stiffness interpolation
filters    Gaussian density smoothing and its adjoint
sparse     COO matrices, direct solves, and solve gradients
fem        element stiffness, assembly, displacement, compliance
objective  compliance value/gradient and the volume constraint
mma        the method of moving asymptotes optimizer
runner     end-to-end runs with image and CSV outputs

Import submodules explicitly, e.g. ``from densitop import problem, objective``.
This top-level module stays import-light so the command line tool can pin
thread counts before any numerical library loads.
"""

__version__ = "0.1.0"
