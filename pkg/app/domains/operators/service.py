from typing import Dict, Optional

import numpy as np

from app.core.logger import logger
from app.api.exceptions import DomainException
from app.domains.field2d.model import TensorField
from app.domains.field2d.service import Field2DService
from app.domains.operators.model import DiscreteOperator, OperatorLabel
from app.domains.spectral_grid.model import Grid1D
from app.utils.parity import even_part


class OperatorService:
    """
    Service assembling dense interior-node matrices of ℒ = −Δ + 1 − 3Q², of
    2B = −3∂xx − ∂yy + 1 − 3Q² − 6xQQ_x, of the rank-2 virial projection 2P and of the
    composite virial operator M = 2(B + P). Boundary rows and columns are dropped, which
    imposes homogeneous Dirichlet conditions.
    """

    def __init__(self, field_service: Field2DService):
        """
        Initialize the service.

        Args:
            field_service (Field2DService): Used for derivatives and weighted norms of fields.
        """
        self._fields = field_service

    # --- Building blocks ---
    def assemble_laplacian(self, grid: Grid1D, cx: float, cy: float) -> np.ndarray:
        """
        Matrix of cx·∂xx + cy·∂yy on interior nodes.

        With the x-fastest ordering, ∂xx acts as I ⊗ D2_int and ∂yy as D2_int ⊗ I.

        Args:
            grid (Grid1D): The grid.
            cx (float): Coefficient of ∂xx.
            cy (float): Coefficient of ∂yy.

        Returns:
            np.ndarray: Dense (N − 1)² × (N − 1)² matrix.
        """
        D2 = grid.D2_int
        identity = np.eye(grid.m)
        return cx * np.kron(identity, D2) + cy * np.kron(D2, identity)

    def derivative_x(self, Q: TensorField) -> TensorField:
        """Q_x by spectral differentiation, projected onto functions odd in x and even in y."""
        return self._fields.even_y(self._fields.odd_x(self._fields.dx(Q)))

    def derivative_y(self, Q: TensorField) -> TensorField:
        """Q_y by spectral differentiation, projected onto functions even in x and odd in y."""
        return self._fields.even_x(self._fields.odd_y(self._fields.dy(Q)))

    @staticmethod
    def _symmetric_potential(values: np.ndarray) -> np.ndarray:
        return even_part(even_part(values, axis=0), axis=1)

    # --- Operators ---
    def assemble_L(self, Q: TensorField) -> DiscreteOperator:
        """
        Linearized operator ℒ = −Δ + 1 − 3Q².

        Args:
            Q (TensorField): Ground state on the grid.

        Returns:
            DiscreteOperator: ℒ with ess_min = 1.
        """
        grid = Q.grid
        logger.info('Assembling linearized operator on %r', grid)
        potential = Q.with_values(self._symmetric_potential(1.0 - 3.0 * Q.values ** 2))
        matrix = -self.assemble_laplacian(grid, 1.0, 1.0) + np.diag(potential.interior_vector())
        return DiscreteOperator(matrix=matrix, label=OperatorLabel.L_OP, symmetric_in_form=True, ess_min=1.0, grid=grid)

    def assemble_B2(self, Q: TensorField, Qx: Optional[TensorField] = None) -> DiscreteOperator:
        """
        Operator 2B = −3∂xx − ∂yy + 1 − 3Q² − 6xQQ_x.

        Args:
            Q (TensorField): Ground state on the grid.
            Qx (Optional[TensorField]): ∂Q/∂x. Computed spectrally when omitted.

        Returns:
            DiscreteOperator: 2B with ess_min = 1.
        """
        grid = Q.grid
        Qx = Qx if Qx is not None else self.derivative_x(Q)
        logger.info('Assembling 2B on %r', grid)
        X, _ = self._fields.mesh(grid)
        potential = Q.with_values(self._symmetric_potential(
            1.0 - 3.0 * Q.values ** 2 - 6.0 * X * Q.values * Qx.values
        ))
        matrix = -self.assemble_laplacian(grid, 3.0, 1.0) + np.diag(potential.interior_vector())
        return DiscreteOperator(matrix=matrix, label=OperatorLabel.B2, symmetric_in_form=True, ess_min=1.0, grid=grid)

    def assemble_projection(self, f: TensorField, g: TensorField, grid: Grid1D, self_adjoint: bool) -> DiscreteOperator:
        """
        Rank-one or rank-two projection built from u ↦ g·⟨u, f⟩_w.

        The plain form is the matrix vec(g)·(w2d ∘ vec(f))ᵀ; the self-adjoint form averages it
        with the same matrix for (g, f).

        Args:
            f (TensorField): Field tested against.
            g (TensorField): Field returned.
            grid (Grid1D): Grid both fields must live on.
            self_adjoint (bool): Build the symmetrized form.

        Raises:
            DomainException: If f or g lives on another grid.

        Returns:
            DiscreteOperator: P2 (self-adjoint) or P2bar, ess_min = 0.
        """
        if not (grid.same_as(f.grid) and grid.same_as(g.grid)):
            raise DomainException(
                f'Projection fields must live on {grid!r}, got {f.grid!r} and {g.grid!r}.', stage='operators'
            )
        weights = grid.weights_2d
        f_vec, g_vec = f.interior_vector(), g.interior_vector()
        matrix = np.outer(g_vec, weights * f_vec)
        if self_adjoint:
            matrix = 0.5 * (matrix + np.outer(f_vec, weights * g_vec))
        label = OperatorLabel.P2 if self_adjoint else OperatorLabel.P2BAR
        return DiscreteOperator(matrix=matrix, label=label, symmetric_in_form=self_adjoint, ess_min=0.0, grid=grid)

    def virial_projection(self, Q: TensorField, Qx: TensorField, self_adjoint: bool = True) -> DiscreteOperator:
        """
        Virial correction 2P.

        Self-adjoint: 2Pv = 6Q²Q_x·⟨v, xQ⟩/‖Q‖² + xQ·⟨v, 6Q²Q_x⟩/‖Q‖². Non-self-adjoint:
        2P̄v = 12Q²Q_x·⟨v, xQ⟩/‖Q‖², which has the same quadratic form.

        Args:
            Q (TensorField): Ground state.
            Qx (TensorField): ∂Q/∂x.
            self_adjoint (bool): Which form to build. Defaults to True.

        Returns:
            DiscreteOperator: The projection matrix.
        """
        X, _ = self._fields.mesh(Q.grid)
        mass = self._fields.inner(Q, Q)
        f = Q.with_values(2.0 * X * Q.values / mass)
        g = Q.with_values(6.0 * Q.values ** 2 * Qx.values)
        return self.assemble_projection(f, g, Q.grid, self_adjoint)

    def assemble_M(
        self,
        Q: TensorField,
        grid: Optional[Grid1D] = None,
        Qx: Optional[TensorField] = None,
        self_adjoint: bool = True
    ) -> DiscreteOperator:
        """
        Virial operator M = 2(B + P) = 2B + 2P.

        Args:
            Q (TensorField): Ground state.
            grid (Optional[Grid1D]): Grid to assemble on. Defaults to the grid of Q.
            Qx (Optional[TensorField]): ∂Q/∂x. Computed spectrally when omitted.
            self_adjoint (bool): Use the self-adjoint projection (label M) or the plain one (label M_bar).

        Raises:
            DomainException: If `grid` differs from the grid of Q.

        Returns:
            DiscreteOperator: The virial operator with ess_min = 1.
        """
        grid = grid or Q.grid
        if not grid.same_as(Q.grid):
            raise DomainException(f'Q lives on {Q.grid!r}, not on {grid!r}.', stage='operators')
        Qx = Qx if Qx is not None else self.derivative_x(Q)
        B2 = self.assemble_B2(Q, Qx)
        projection = self.virial_projection(Q, Qx, self_adjoint)
        label = OperatorLabel.M if self_adjoint else OperatorLabel.M_BAR
        operator = DiscreteOperator(
            matrix=B2.matrix + projection.matrix, label=label, symmetric_in_form=self_adjoint, ess_min=1.0, grid=grid
        )
        logger.info('Assembled %r', operator)
        return operator

    # --- Identities of the linearized operator ---
    def identity_residuals(self, Q: TensorField, Qx: TensorField, Qy: TensorField, L_op: Optional[DiscreteOperator] = None) -> Dict[str, float]:
        """
        Relative residuals of ℒQ = −2Q³, ℒ(ΛQ) = −2Q and ℒQ_x = 0 in the weighted norm.

        Args:
            Q (TensorField): Ground state.
            Qx (TensorField): ∂Q/∂x.
            Qy (TensorField): ∂Q/∂y.
            L_op (Optional[DiscreteOperator]): Pre-assembled ℒ. Assembled when omitted.

        Returns:
            Dict[str, float]: Keys 'LQ', 'LLambdaQ' and 'LQx'.
        """
        L_op = L_op or self.assemble_L(Q)
        grid = Q.grid
        q = Q.interior_vector()
        lam = self._fields.lambda_q(Q, Qx, Qy).interior_vector()
        qx = Qx.interior_vector()

        def norm(v: np.ndarray) -> float:
            return float(np.sqrt(self._fields.inner_vectors(grid, v, v)))

        residuals = {
            'LQ': norm(L_op.matrix @ q + 2.0 * q ** 3) / norm(q ** 3),
            'LLambdaQ': norm(L_op.matrix @ lam + 2.0 * q) / norm(q),
            'LQx': norm(L_op.matrix @ qx) / norm(qx),
        }
        logger.info('Linearized-operator identity residuals: %s', residuals)
        return residuals
