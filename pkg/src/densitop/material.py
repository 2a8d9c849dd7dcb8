"""Density-to-stiffness interpolation with penalization.

Intermediate densities are penalized: stiffness follows x**penal between a
small positive floor (so the stiffness matrix stays invertible where x = 0)
and the solid value.
"""

import dataclasses


@dataclasses.dataclass(frozen=True)
class MaterialModel:
    """Interpolation constants: solid stiffness, void floor, and exponent."""

    e_0: float = 1.0
    e_min: float = 1e-9
    penal: float = 3.0

    def __post_init__(self):
        if not 0.0 < self.e_min < self.e_0:
            raise ValueError("material model requires 0 < e_min < e_0")
        if self.penal < 1.0:
            raise ValueError(f"penal must be at least 1, got {self.penal}")


def young_modulus(x, model):
    """Stiffness of material at density ``x`` (scalar or array)."""
    return model.e_min + x ** model.penal * (model.e_0 - model.e_min)


def young_modulus_derivative(x, model):
    """Exact derivative of young_modulus with respect to ``x``."""
    return model.penal * x ** (model.penal - 1.0) * (model.e_0 - model.e_min)


def from_spec(spec):
    """MaterialModel carrying a ProblemSpec's stiffness constants."""
    return MaterialModel(e_0=spec.young, e_min=spec.young_min, penal=spec.penal)
