from enum import Enum

import numpy as np
from pydantic import Field

from app.domains.mixins import ArrayModel


class SolverMethod(str, Enum):
    """How a radial profile was obtained."""
    RENORMALIZATION = 'renormalization'
    SHOOTING = 'shooting'


class RadialProfile(ArrayModel):
    """
    Radial ground state R(r) on [0, r_max] with r_max = 3L/2.

    Attributes:
        L (float): Half-width of the 2D computational square the profile is built for.
        r_max (float): Outer radius, where R(r_max) = 0.
        nodes (np.ndarray): Strictly increasing radii, nodes[0] = 0.
        values (np.ndarray): R at the nodes.
        deriv (np.ndarray): R' at the nodes.
        method (SolverMethod): Solver that produced the profile.
        iterations (int): Fixed-point iterations or bisection steps.
        residual (float): Dimensionless max-norm residual reported by the solver.
    """
    L: float
    r_max: float
    nodes: np.ndarray
    values: np.ndarray
    deriv: np.ndarray
    method: SolverMethod
    iterations: int = Field(ge=0)
    residual: float = Field(ge=0.0)

    @property
    def amplitude(self) -> float:
        """Peak value R(0)."""
        return float(self.values[0])

    def __repr__(self) -> str:
        return (
            f'RadialProfile(L={self.L}, nodes={self.nodes.size}, method={self.method.value}, '
            f'R(0)={self.amplitude:.6f}, residual={self.residual:.2e})'
        )


class RadialDiagnostics(ArrayModel):
    """
    Integral functionals of Q(x, y) = R(|(x, y)|) over the plane.

    Attributes:
        mass (float): ∫Q².
        grad_sq (float): ∫|∇Q|².
        l4_4 (float): ∫Q⁴.
        energy (float): ½∫|∇Q|² − ¼∫Q⁴.
    """
    mass: float
    grad_sq: float
    l4_4: float
    energy: float

    @property
    def pohozaev_defects(self) -> tuple[float, float]:
        """Return (mass − grad_sq, l4_4 − 2·mass), both zero for the exact ground state."""
        return self.mass - self.grad_sq, self.l4_4 - 2.0 * self.mass
