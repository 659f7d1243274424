from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy import linalg

from app.core.logger import logger
from app.api.exceptions import CertificationException, ConstraintRankException, DomainException
from app.domains.certify.schema import AngleTable, CoercivityBounds, GridParams, SpectralReport, Verdict
from app.domains.eigen.model import EigenPair, Parity
from app.domains.eigen.service import EigenService
from app.domains.field2d.model import TensorField
from app.domains.field2d.service import Field2DService
from app.domains.operators.model import DiscreteOperator

RANK_TOL = 1e-10


class CertifyService:
    """
    Service turning eigenpairs into a coercivity statement.

    On each x-parity subspace the one negative direction is controlled by the angle lemma:
    if v ⊥ f with ‖f‖ = 1 and cos β = ⟨f, e₁⟩, then
    ⟨Av, v⟩ ≥ (λ_⊥ − (λ_⊥ − λ₁)·sin²β)‖v‖². Odd functions are constrained by Q_x and even
    functions by Q.
    """

    def __init__(self, eigen_service: EigenService, field_service: Field2DService):
        """
        Initialize the service.

        Args:
            eigen_service (EigenService): Provides parity blocks and weighted similarity.
            field_service (Field2DService): Provides weighted inner products of fields.
        """
        self._eigen = eigen_service
        self._fields = field_service

    # --- Geometry ---
    def angles(self, pairs: Sequence[EigenPair], Q: TensorField, Qx: TensorField) -> np.ndarray:
        """
        Absolute cosines between eigenfunctions and the normalized pair (Q, Q_x).

        Args:
            pairs (Sequence[EigenPair]): w-normalized eigenpairs.
            Q (TensorField): Ground state.
            Qx (TensorField): ∂Q/∂x.

        Returns:
            np.ndarray: 2 × k table; row 0 against Q, row 1 against Q_x; entries in [0, 1].
        """
        grid = Q.grid
        table = np.zeros((2, len(pairs)))
        for row, reference in enumerate((Q, Qx)):
            ref = reference.interior_vector()
            ref = ref / np.sqrt(self._fields.inner_vectors(grid, ref, ref))
            for column, pair in enumerate(pairs):
                table[row, column] = abs(self._fields.inner_vectors(grid, pair.vector, ref))
        return np.clip(table, 0.0, 1.0)

    def angle_lemma_bound(self, lambda1: float, lambda_perp: float, cos_beta: float) -> float:
        """
        Lower bound λ_⊥ − (λ_⊥ − λ₁)(1 − cos²β) on the constrained quadratic form.

        Args:
            lambda1 (float): The eigenvalue below the rest of the spectrum.
            lambda_perp (float): Lower bound of the spectrum orthogonal to the eigenfunction.
            cos_beta (float): Cosine between the eigenfunction and the constraint function.

        Raises:
            DomainException: If lambda_perp ≤ lambda1 or |cos_beta| > 1.

        Returns:
            float: The bound.
        """
        if lambda_perp <= lambda1 or abs(cos_beta) > 1.0:
            raise DomainException(
                f'Angle lemma needs lambda_perp > lambda1 and |cos_beta| ≤ 1, got '
                f'({lambda1}, {lambda_perp}, {cos_beta}).',
                stage='certify'
            )
        return lambda_perp - (lambda_perp - lambda1) * (1.0 - cos_beta ** 2)

    # --- Certification ---
    def certify_coercivity(
        self,
        Q: TensorField,
        Qx: TensorField,
        pairs: Sequence[EigenPair],
        cutoff: float,
        operator: str = 'M',
        scale: float = 1.0,
        symmetric_in_form: bool = True
    ) -> SpectralReport:
        """
        Per-parity angle-lemma bounds and the coercivity verdict.

        Eigenvalues are multiplied by `scale` before use, so pairs of M = 2(B + P) certify
        A = B + P with scale ½ and cutoff ½.

        Args:
            Q (TensorField): Ground state.
            Qx (TensorField): ∂Q/∂x.
            pairs (Sequence[EigenPair]): Every eigenpair below the cutoff.
            cutoff (float): λ_⊥, in scaled units.
            operator (str): Label recorded in the report. Defaults to 'M'.
            scale (float): Factor applied to eigenvalues. Defaults to 1.
            symmetric_in_form (bool): Whether the operator is self-adjoint. Defaults to True.

        Raises:
            CertificationException: If an eigenfunction is of mixed parity.

        Returns:
            SpectralReport: Report with bounds and verdict.
        """
        logger.info('Certifying %s: %d eigenpair(s), cutoff=%s, scale=%s', operator, len(pairs), cutoff, scale)
        mixed = [p.value for p in pairs if p.parity == Parity.MIXED]
        if mixed:
            raise CertificationException(
                'Eigenfunctions of mixed x-parity prevent the parity split.',
                details=[{'operator': operator, 'eigenvalues': mixed}]
            )

        table = self.angles(pairs, Q, Qx)
        flags: List[str] = []
        bounds: Dict[str, Optional[float]] = {}
        classes = ((Parity.ODD_X, 'odd', 1), (Parity.EVEN_X, 'even', 0))
        for parity, name, row in classes:
            members = [i for i, p in enumerate(pairs) if p.parity == parity]
            if not members:
                bounds[name] = cutoff
            elif len(members) > 1:
                flags.append(f'more than one eigenvalue below cutoff in the {name} class')
                bounds[name] = None
            else:
                index = members[0]
                bounds[name] = self.angle_lemma_bound(scale * pairs[index].value, cutoff, float(table[row, index]))
                logger.debug('%s class: λ=%.6f, cos=%.6f, bound=%.6f', name, scale * pairs[index].value, table[row, index], bounds[name])

        if not symmetric_in_form:
            flags.append('operator is not self-adjoint; angle lemma not applicable')
        tolerance = self._eigen.tol_eig
        if any(p.residual > tolerance * (abs(p.value) + 1.0) for p in pairs):
            flags.append('eigenpair residual above tolerance')

        known = [b for b in bounds.values() if b is not None]
        overall = min(known) if len(known) == len(bounds) else None
        blocking = (not symmetric_in_form) or overall is None
        verdict = Verdict.POSITIVE if (not blocking and overall > 0) else Verdict.NOT_CERTIFIED

        report = SpectralReport(
            operator=operator,
            grid=GridParams(N=Q.grid.N, L=Q.grid.L, a=Q.grid.a),
            cutoff=cutoff,
            scale=scale,
            eigenvalues=[p.value for p in pairs],
            certified_eigenvalues=[scale * p.value for p in pairs],
            residuals=[p.residual for p in pairs],
            parities=[p.parity.value for p in pairs],
            degenerate=[p.degenerate for p in pairs],
            angles=AngleTable(Q=table[0].tolist(), Qx=table[1].tolist()),
            bounds=CoercivityBounds(odd=bounds['odd'], even=bounds['even'], overall=overall),
            verdict=verdict,
            flags=flags,
            tolerances={
                'eig_residual': tolerance,
                'parity': self._eigen.parity_tol,
                'degeneracy': self._eigen.degeneracy_tol,
            },
            pairs=list(pairs)
        )
        logger.info('Certification of %s: bounds=%s, verdict=%s', operator, report.bounds.model_dump(), verdict.value)
        return report

    def certify_constrained(
        self,
        op: DiscreteOperator,
        pairs: Sequence[EigenPair],
        Q: TensorField,
        Qx: TensorField,
        constraints: Sequence[TensorField]
    ) -> SpectralReport:
        """
        Report for an operator certified by constrained minimization instead of the angle lemma.

        Used for ℒ under {Q³, Q_x, Q_y}: the overall bound is the constrained minimum μ and
        the coercivity constant of ⟨f, f⟩ ≤ C₁⟨ℒf, f⟩ is C₁ = 1/μ.

        Args:
            op (DiscreteOperator): Self-adjoint-in-form operator.
            pairs (Sequence[EigenPair]): Its eigenpairs below the cutoff.
            Q (TensorField): Ground state.
            Qx (TensorField): ∂Q/∂x.
            constraints (Sequence[TensorField]): Orthogonality constraints.

        Returns:
            SpectralReport: Report with overall bound μ and the C₁ estimate.
        """
        minimum = self.constrained_rayleigh_min(op, constraints)
        table = self.angles(pairs, Q, Qx)
        flags: List[str] = []
        if minimum <= 0:
            flags.append('constrained minimum is not positive')
        tolerance = self._eigen.tol_eig
        if any(p.residual > tolerance * (abs(p.value) + 1.0) for p in pairs):
            flags.append('eigenpair residual above tolerance')
        return SpectralReport(
            operator=op.label.value,
            grid=GridParams(N=op.grid.N, L=op.grid.L, a=op.grid.a),
            cutoff=op.ess_min,
            eigenvalues=[p.value for p in pairs],
            certified_eigenvalues=[p.value for p in pairs],
            residuals=[p.residual for p in pairs],
            parities=[p.parity.value for p in pairs],
            degenerate=[p.degenerate for p in pairs],
            angles=AngleTable(Q=table[0].tolist(), Qx=table[1].tolist()),
            bounds=CoercivityBounds(overall=minimum),
            verdict=Verdict.POSITIVE if minimum > 0 else Verdict.NOT_CERTIFIED,
            flags=flags,
            c1_estimate=1.0 / minimum if minimum > 0 else None,
            tolerances={
                'eig_residual': tolerance,
                'parity': self._eigen.parity_tol,
                'degeneracy': self._eigen.degeneracy_tol,
                'rank': RANK_TOL,
            },
            pairs=list(pairs)
        )

    # --- Constrained minimization ---
    def constrained_rayleigh_min(self, op: DiscreteOperator, constraints: Sequence[TensorField]) -> float:
        """
        Minimum of ⟨Au, u⟩_w / ⟨u, u⟩_w over u weighted-orthogonal to every constraint.

        Constraints are deflated by restricting the symmetric part of the weighted-similar
        matrix to the orthogonal complement of their images, block by block.

        Args:
            op (DiscreteOperator): Self-adjoint-in-form operator.
            constraints (Sequence[TensorField]): Linearly independent constraint functions.

        Raises:
            DomainException: If the operator is not self-adjoint in form.
            ConstraintRankException: If the constraints are dependent or leave no admissible vector.

        Returns:
            float: The constrained minimum.
        """
        if not op.symmetric_in_form:
            raise DomainException(f'{op.label.value} is not self-adjoint; the Rayleigh quotient is not defined.', stage='certify')
        k = len(constraints)
        logger.info('Constrained Rayleigh minimum of %r with %d constraint(s)', op, k)
        if k >= op.n:
            raise ConstraintRankException(
                f'{k} constraints leave no admissible subspace in dimension {op.n}.',
                details=[{'constraints': k, 'dimension': op.n}]
            )

        root = np.sqrt(op.weights)
        C = np.column_stack([root * c.interior_vector() for c in constraints]) if k else np.zeros((op.n, 0))
        if k:
            normalized = C / np.linalg.norm(C, axis=0)
            singular = linalg.svdvals(normalized)
            if singular.min() <= RANK_TOL * singular.max():
                raise ConstraintRankException(
                    'Constraint set is rank deficient in the weighted inner product.',
                    details=[{'smallest_singular_value': float(singular.min())}]
                )

        S = self._eigen.similarity(op)
        symmetric = 0.5 * (S + S.T)
        minima: List[float] = []
        for label, basis in self._eigen.parity_blocks(op):
            block_constraints = np.asarray(basis.T @ C)
            if k:
                scale = np.linalg.norm(C, axis=0)
                block_constraints[:, np.linalg.norm(block_constraints, axis=0) <= 1e-12 * scale] = 0.0
            complement = linalg.null_space(block_constraints.T, rcond=RANK_TOL) if k else None
            compressed = self._eigen.compress(symmetric, basis)
            if complement is not None:
                if complement.shape[1] == 0:
                    continue
                compressed = complement.T @ compressed @ complement
            minimum = float(linalg.eigvalsh(compressed, subset_by_index=[0, 0])[0])
            logger.debug('Block %s: constrained minimum %.8f', label, minimum)
            minima.append(minimum)

        if not minima:
            raise ConstraintRankException('Constraints exhaust every parity block.')
        result = min(minima)
        logger.info('Constrained Rayleigh minimum of %s: %.8f', op.label.value, result)
        return result
