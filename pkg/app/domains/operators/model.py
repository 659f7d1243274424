from enum import Enum

import numpy as np

from app.domains.mixins import ArrayModel
from app.domains.spectral_grid.model import Grid1D
from app.utils.parity import reflection_indices


class OperatorLabel(str, Enum):
    """Which continuous operator a matrix discretizes."""
    L_OP = 'L_op'
    B2 = 'B2'
    P2 = 'P2'
    P2BAR = 'P2bar'
    M = 'M'
    M_BAR = 'M_bar'


class DiscreteOperator(ArrayModel):
    """
    Dense interior-node matrix of a Schrödinger-type operator with Dirichlet conditions.

    The matrix acts on interior vectors in the x-fastest ordering and is self-adjoint, when
    `symmetric_in_form` holds, in ⟨u, v⟩_w = Σ w2d·u·v rather than entrywise.

    Attributes:
        matrix (np.ndarray): n × n, n = (N − 1)².
        label (OperatorLabel): Discretized operator.
        symmetric_in_form (bool): Whether the continuous operator is self-adjoint.
        ess_min (float): Infimum of the continuous essential spectrum.
        grid (Grid1D): Grid the operator lives on.
    """
    matrix: np.ndarray
    label: OperatorLabel
    symmetric_in_form: bool
    ess_min: float
    grid: Grid1D

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def weights(self) -> np.ndarray:
        """Interior 2D quadrature weights aligned with the matrix ordering."""
        return self.grid.weights_2d

    def commutes_with(self, axis: str) -> bool:
        """Exact (bitwise) commutation with the x- or y-reflection permutation."""
        permutation = reflection_indices(self.grid.m, axis)
        return bool(np.array_equal(self.matrix[np.ix_(permutation, permutation)], self.matrix))

    def __repr__(self) -> str:
        return (
            f'DiscreteOperator(label={self.label.value}, n={self.n}, '
            f'symmetric_in_form={self.symmetric_in_form}, ess_min={self.ess_min})'
        )
