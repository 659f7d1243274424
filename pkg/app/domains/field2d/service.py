from typing import Callable, Tuple

import numpy as np
from scipy.interpolate import PchipInterpolator

from app.core.logger import logger
from app.api.exceptions import DomainException
from app.domains.field2d.model import TensorField
from app.domains.ground_state.model import RadialProfile
from app.domains.spectral_grid.model import Grid1D
from app.utils.parity import even_part, odd_part


class Field2DService:
    """
    Service for scalar fields on the square tensor grid: sampling, radial interpolation of
    the ground state, spectral partial derivatives and the weighted inner product
    ⟨f, g⟩_w = Σ_ij w_i w_j f_ij g_ij.
    """

    # --- Construction ---
    def mesh(self, grid: Grid1D) -> Tuple[np.ndarray, np.ndarray]:
        """Coordinate arrays X[i, j] = x_i and Y[i, j] = y_j."""
        return np.meshgrid(grid.x, grid.x, indexing='ij')

    def sample(self, grid: Grid1D, function: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> TensorField:
        """
        Sample f(x, y) at every grid node.

        Args:
            grid (Grid1D): The grid.
            function (Callable): Vectorized f(X, Y).

        Returns:
            TensorField: Samples of f.
        """
        X, Y = self.mesh(grid)
        return TensorField(grid=grid, values=np.asarray(function(X, Y), dtype=float))

    def radial_to_field(self, profile: RadialProfile, grid: Grid1D) -> TensorField:
        """
        Evaluate Q(x, y) = R(√(x² + y²)) by monotone piecewise-cubic (PCHIP) interpolation.

        Args:
            profile (RadialProfile): Radial ground state.
            grid (Grid1D): Target grid.

        Raises:
            DomainException: If the profile does not reach the grid corners, r_max < √2·L.

        Returns:
            TensorField: Non-negative samples of Q.
        """
        corner = float(np.hypot(grid.L, grid.L))
        if profile.nodes[-1] < corner:
            logger.warning('Radial profile ends at r=%.4f, grid corner at r=%.4f', profile.nodes[-1], corner)
            raise DomainException(
                f'Radial profile covers r ≤ {profile.nodes[-1]:.4f} but the grid reaches r = {corner:.4f}.',
                stage='fields',
                details=[{'r_max': float(profile.nodes[-1]), 'corner': corner}]
            )
        logger.info('Interpolating %r onto %r', profile, grid)

        interpolant = PchipInterpolator(profile.nodes, profile.values, extrapolate=False)
        X, Y = self.mesh(grid)
        radius = np.sqrt(X * X + Y * Y)
        values = np.clip(np.nan_to_num(interpolant(radius), nan=0.0), 0.0, None)
        return TensorField(grid=grid, values=values)

    # --- Differentiation ---
    def dx(self, field: TensorField) -> TensorField:
        """Spectral ∂/∂x: D1 applied along the first index."""
        return field.with_values(field.grid.D1 @ field.values)

    def dy(self, field: TensorField) -> TensorField:
        """Spectral ∂/∂y: D1 applied along the second index."""
        return field.with_values(field.values @ field.grid.D1.T)

    def lambda_q(self, Q: TensorField, Qx: TensorField, Qy: TensorField) -> TensorField:
        """
        Scaling generator ΛQ = Q + x·Q_x + y·Q_y.

        Args:
            Q (TensorField): Ground state field.
            Qx (TensorField): ∂Q/∂x.
            Qy (TensorField): ∂Q/∂y.

        Raises:
            DomainException: If the fields live on different grids.

        Returns:
            TensorField: ΛQ.
        """
        self._check_grids(Q, Qx, Qy)
        X, Y = self.mesh(Q.grid)
        return Q.with_values(Q.values + X * Qx.values + Y * Qy.values)

    # --- Parity ---
    def odd_x(self, field: TensorField) -> TensorField:
        return field.with_values(odd_part(field.values, axis=0))

    def even_x(self, field: TensorField) -> TensorField:
        return field.with_values(even_part(field.values, axis=0))

    def odd_y(self, field: TensorField) -> TensorField:
        return field.with_values(odd_part(field.values, axis=1))

    def even_y(self, field: TensorField) -> TensorField:
        return field.with_values(even_part(field.values, axis=1))

    # --- Weighted inner product ---
    def inner(self, f: TensorField, g: TensorField) -> float:
        """
        Discrete L² inner product with the tensor quadrature weights.

        Args:
            f (TensorField): First field.
            g (TensorField): Second field.

        Raises:
            DomainException: If the fields live on different grids.

        Returns:
            float: ⟨f, g⟩_w.
        """
        self._check_grids(f, g)
        w = f.grid.w
        return float(w @ (f.values * g.values) @ w)

    def norm(self, field: TensorField) -> float:
        return float(np.sqrt(self.inner(field, field)))

    @staticmethod
    def inner_vectors(grid: Grid1D, u: np.ndarray, v: np.ndarray) -> float:
        """⟨u, v⟩_w for interior vectors (boundary weights vanish, so this equals the field product)."""
        return float(np.sum(grid.weights_2d * u * v))

    @staticmethod
    def _check_grids(*fields: TensorField) -> None:
        first = fields[0].grid
        for other in fields[1:]:
            if not first.same_as(other.grid):
                raise DomainException(
                    f'Fields live on different grids: {first!r} and {other.grid!r}.', stage='fields'
                )
