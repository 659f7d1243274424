import numpy as np
from pydantic import Field

from app.domains.mixins import ArrayModel


class Grid1D(ArrayModel):
    """
    Mapped Chebyshev-Gauss-Lobatto grid on [−L, L].

    Nodes are ordered descending (x[0] = L, x[N] = −L); the same grid is used for x and y.

    Attributes:
        N (int): Polynomial degree, N + 1 nodes.
        L (float): Half-width of the interval.
        a (float): Steepness of the hyperbolic-sine map.
        xi (np.ndarray): Reference nodes on [−1, 1].
        x (np.ndarray): Mapped nodes.
        x_xi (np.ndarray): dx/dξ at the nodes.
        x_xixi (np.ndarray): d²x/dξ² at the nodes.
        w (np.ndarray): Quadrature weights for ∫_{−L}^{L} f dx.
        D1 (np.ndarray): Mapped first-derivative matrix.
        D2 (np.ndarray): Mapped second-derivative matrix.
    """
    N: int = Field(ge=4)
    L: float = Field(gt=0.0)
    a: float = Field(gt=0.0)
    xi: np.ndarray
    x: np.ndarray
    x_xi: np.ndarray
    x_xixi: np.ndarray
    w: np.ndarray
    D1: np.ndarray
    D2: np.ndarray

    @property
    def interior(self) -> slice:
        return slice(1, self.N)

    @property
    def m(self) -> int:
        """Interior nodes per direction."""
        return self.N - 1

    @property
    def x_int(self) -> np.ndarray:
        return self.x[self.interior]

    @property
    def w_int(self) -> np.ndarray:
        return self.w[self.interior]

    @property
    def D2_int(self) -> np.ndarray:
        """D2 with boundary rows and columns removed (homogeneous Dirichlet)."""
        return self.D2[self.interior, self.interior]

    @property
    def weights_2d(self) -> np.ndarray:
        """Interior tensor weights w_i·w_j flattened with the x-index fastest."""
        return np.outer(self.w_int, self.w_int).flatten(order='F')

    def same_as(self, other: 'Grid1D') -> bool:
        """Whether `other` was built with the same (N, L, a)."""
        return self is other or (self.N == other.N and self.L == other.L and self.a == other.a)

    def __repr__(self) -> str:
        return f'Grid1D(N={self.N}, L={self.L}, a={self.a})'
