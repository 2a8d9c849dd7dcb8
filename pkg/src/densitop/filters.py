"""Gaussian smoothing of density fields and its adjoint.

Smoothing decouples the design variables from the densities the physics sees,
which suppresses checkerboard patterns.  The blur is separable with standard
deviation ``width`` in element units, kernel truncated at ceil(4 * width)
samples, and edge-duplicating ("reflect") boundary handling: d c b a | a b c d.
With a symmetric kernel this boundary rule makes the operator self-adjoint,
which is what lets the sensitivity chain reuse the forward blur.
"""

import math

import numpy as np
import scipy.ndimage


def gaussian_filter(x, width):
    """Blur ``x`` with a truncated Gaussian of standard deviation ``width``."""
    if width <= 0:
        raise ValueError(f"filter width must be positive, got {width}")
    return scipy.ndimage.gaussian_filter(
        np.asarray(x, dtype=np.float64),
        sigma=width,
        mode="reflect",
        radius=math.ceil(4 * width),
    )


def gaussian_filter_adjoint(g, width):
    """Adjoint of gaussian_filter; equals the forward blur (self-adjoint)."""
    return gaussian_filter(g, width)


def physical_density(x, spec, use_filter=True):
    """Densities the physics sees: mask applied, then optionally blurred."""
    x = np.asarray(x, dtype=np.float64).reshape(spec.nely, spec.nelx)
    x = spec.mask * x
    return gaussian_filter(x, spec.filter_width) if use_filter else x


def mean_density(x, spec, use_filter=True):
    """Volume fraction of the design, ignoring masked-out cells."""
    return np.mean(physical_density(x, spec, use_filter)) / np.mean(spec.mask)
