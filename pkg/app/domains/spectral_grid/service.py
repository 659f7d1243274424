from typing import Tuple

import numpy as np

from app.core.logger import logger
from app.api.exceptions import DomainException
from app.domains.spectral_grid.model import Grid1D
from app.utils.parity import even_matrix, even_part, odd_matrix, odd_part


class SpectralGridService:
    """
    Service building Chebyshev-Gauss-Lobatto collocation grids mapped to [−L, L] by
    x(ξ) = L·sinh(aξ)/sinh(a), which concentrates nodes near the origin.
    """

    def cgl_grid(self, N: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Reference nodes and differentiation matrices on [−1, 1].

        D1 uses the negative-sum trick on its diagonal; D2 is the square of D1 with the
        diagonal recomputed the same way. Both are projected onto their exact reflection
        structure so that mapped operators commute bit-exactly with x → −x.

        Args:
            N (int): Polynomial degree, even and ≥ 4.

        Raises:
            DomainException: If N is odd or smaller than 4.

        Returns:
            Tuple[np.ndarray, np.ndarray, np.ndarray]: (xi, D1_ref, D2_ref).
        """
        if N < 4 or N % 2:
            raise DomainException(f'Collocation degree must be even and at least 4, got N={N}.', stage='grid')
        logger.debug('Building CGL reference grid with N=%d', N)

        index = np.arange(N + 1)
        # cos(iπ/N) written as a sine so the node set is exactly odd
        xi = odd_part(np.sin(np.pi * (N - 2 * index) / (2.0 * N)))

        c = np.ones(N + 1)
        c[0] = c[N] = 2.0
        c *= (-1.0) ** index
        dX = xi[:, None] - xi[None, :]
        D = np.outer(c, 1.0 / c) / (dX + np.eye(N + 1))
        D -= np.diag(D.sum(axis=1))
        D1 = odd_matrix(D)

        D2 = D1 @ D1
        np.fill_diagonal(D2, 0.0)
        D2 -= np.diag(D2.sum(axis=1))
        D2 = even_matrix(D2)
        return xi, D1, D2

    def map_grid(
        self,
        xi: np.ndarray,
        L: float,
        a: float,
        D1_ref: np.ndarray | None = None,
        D2_ref: np.ndarray | None = None
    ) -> Grid1D:
        """
        Map the reference grid to [−L, L] and apply the chain rule to the matrices.

        D1 = diag(1/x_ξ)·D1_ref and D2 = diag(1/x_ξ²)·D2_ref + diag((D1_ref·(1/x_ξ))·(1/x_ξ))·D1_ref.

        Args:
            xi (np.ndarray): Reference nodes from cgl_grid.
            L (float): Half-width, > 0.
            a (float): Map steepness, > 0.
            D1_ref (np.ndarray | None): Reference first-derivative matrix. Rebuilt from N when omitted.
            D2_ref (np.ndarray | None): Reference second-derivative matrix. Rebuilt from N when omitted.

        Raises:
            DomainException: If L or a is not positive.

        Returns:
            Grid1D: The mapped grid with quadrature weights.
        """
        if L <= 0 or a <= 0:
            raise DomainException(f'Grid mapping requires L > 0 and a > 0, got L={L}, a={a}.', stage='grid')
        N = xi.size - 1
        if D1_ref is None or D2_ref is None:
            _, D1_ref, D2_ref = self.cgl_grid(N)
        sinh_a = np.sinh(a)

        x = odd_part(L * np.sinh(a * xi) / sinh_a)
        x[0], x[N], x[N // 2] = L, -L, 0.0
        x_xi = even_part(a * L * np.cosh(a * xi) / sinh_a)
        x_xixi = odd_part(a * a * L * np.sinh(a * xi) / sinh_a)

        inv_metric = 1.0 / x_xi
        D1 = odd_matrix(inv_metric[:, None] * D1_ref)
        correction = (D1_ref @ inv_metric) * inv_metric
        D2 = even_matrix((inv_metric ** 2)[:, None] * D2_ref + correction[:, None] * D1_ref)

        grid = Grid1D(N=N, L=L, a=a, xi=xi, x=x, x_xi=x_xi, x_xixi=x_xixi, w=np.zeros(N + 1), D1=D1, D2=D2)
        return grid.model_copy(update={'w': self.quad_weights(grid)})

    def quad_weights(self, grid: Grid1D) -> np.ndarray:
        """
        Mapped Chebyshev-Lobatto weights w_i = (π/N)·√(1 − ξ_i²)·x_ξ(ξ_i).

        The metric factor is always included so that Σ w_i f(x_i) approximates ∫_{−L}^{L} f dx.

        Args:
            grid (Grid1D): A mapped grid.

        Returns:
            np.ndarray: Non-negative weights, zero at both endpoints.
        """
        weights = even_part((np.pi / grid.N) * np.sqrt(np.clip(1.0 - grid.xi ** 2, 0.0, None)) * grid.x_xi)
        weights[0] = weights[-1] = 0.0
        return weights

    def build_grid(self, N: int, L: float, a: float) -> Grid1D:
        """
        Build the mapped grid in one call.

        Args:
            N (int): Polynomial degree, even and ≥ 4.
            L (float): Half-width.
            a (float): Map steepness.

        Returns:
            Grid1D: The grid.
        """
        logger.info('Building mapped Chebyshev grid: N=%d, L=%s, a=%s', N, L, a)
        xi, D1_ref, D2_ref = self.cgl_grid(N)
        grid = self.map_grid(xi, L, a, D1_ref, D2_ref)
        logger.info(
            'Grid ready: %r, min spacing=%.4e, max spacing=%.4e, sum(w)=%.6f',
            grid, float(np.min(-np.diff(grid.x))), float(np.max(-np.diff(grid.x))), float(grid.w.sum())
        )
        return grid
