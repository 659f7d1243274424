import numpy as np
from pydantic import model_validator

from app.domains.mixins import ArrayModel
from app.domains.spectral_grid.model import Grid1D


class TensorField(ArrayModel):
    """
    Scalar field on the square tensor grid, values[i, j] = f(x_i, y_j).

    Interior vectors drop the boundary ring and are flattened column-major, so the
    x-index varies fastest: k = (i − 1) + (N − 1)(j − 1). Every matrix assembly relies
    on this ordering.

    Attributes:
        grid (Grid1D): Grid shared by both directions.
        values (np.ndarray): (N + 1) × (N + 1) samples.
    """
    grid: Grid1D
    values: np.ndarray

    @model_validator(mode='after')
    def _check_shape(self) -> 'TensorField':
        expected = (self.grid.N + 1, self.grid.N + 1)
        if self.values.shape != expected:
            raise ValueError(f'Field shape {self.values.shape} does not match grid {expected}')
        return self

    def interior_vector(self) -> np.ndarray:
        """Interior samples flattened with the x-index fastest."""
        inner = self.grid.interior
        return self.values[inner, inner].flatten(order='F')

    @classmethod
    def from_interior(cls, grid: Grid1D, vector: np.ndarray) -> 'TensorField':
        """
        Embed an interior vector as a field with zero boundary values.

        Args:
            grid (Grid1D): Target grid.
            vector (np.ndarray): Interior samples, length (N − 1)².

        Returns:
            TensorField: The field.
        """
        values = np.zeros((grid.N + 1, grid.N + 1))
        values[grid.interior, grid.interior] = np.reshape(vector, (grid.m, grid.m), order='F')
        return cls(grid=grid, values=values)

    def with_values(self, values: np.ndarray) -> 'TensorField':
        """Same grid, new samples."""
        return TensorField(grid=self.grid, values=values)

    def __repr__(self) -> str:
        return f'TensorField({self.grid!r}, max|f|={float(np.max(np.abs(self.values))):.4e})'
