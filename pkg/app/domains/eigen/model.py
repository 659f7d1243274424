from enum import Enum

import numpy as np

from app.domains.mixins import ArrayModel
from app.domains.spectral_grid.model import Grid1D


class Parity(str, Enum):
    """Symmetry of an eigenfunction under x → −x."""
    EVEN_X = 'even_x'
    ODD_X = 'odd_x'
    MIXED = 'mixed'


class EigenPair(ArrayModel):
    """
    Eigenvalue below the essential spectrum with its eigenfunction.

    Attributes:
        value (float): Real part of the eigenvalue.
        vector (np.ndarray): Interior eigenfunction samples, ‖φ‖_w = 1.
        residual (float): ‖Aφ − λφ‖_w.
        parity (Parity): x-parity class.
        degenerate (bool): Another eigenvalue lies within the degeneracy tolerance.
        imag (float): Imaginary part reported by the eigensolver.
        grid (Grid1D): Grid of the eigenfunction.
    """
    value: float
    vector: np.ndarray
    residual: float
    parity: Parity = Parity.MIXED
    degenerate: bool = False
    imag: float = 0.0
    grid: Grid1D

    def __repr__(self) -> str:
        return (
            f'EigenPair(value={self.value:.6f}, parity={self.parity.value}, '
            f'residual={self.residual:.2e}, degenerate={self.degenerate})'
        )
