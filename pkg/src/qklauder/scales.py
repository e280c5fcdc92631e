"""Physical units and the quadrature coefficients of X and P."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .qkernel import Deformation

__all__ = ["PhysicalScales", "QuadratureCoeffs", "quadrature_coeffs"]


@dataclass(frozen=True)
class PhysicalScales:
    hbar: float = 1.0
    mass: float = 1.0
    omega: float = 1.0

    def __post_init__(self):
        for name in ("hbar", "mass", "omega"):
            value = getattr(self, name)
            if not (value > 0.0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")


@dataclass(frozen=True)
class QuadratureCoeffs:
    """``X = alpha (A^+ + A)``, ``P = i beta (A^+ - A)``."""

    alpha: float
    beta: float


def quadrature_coeffs(d: Deformation, scales: PhysicalScales) -> QuadratureCoeffs:
    root = 0.5 * math.sqrt(1.0 + d.q_sq)
    return QuadratureCoeffs(
        alpha=root * math.sqrt(scales.hbar / (scales.mass * scales.omega)),
        beta=root * math.sqrt(scales.hbar * scales.mass * scales.omega),
    )
