from typing import List, Literal, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg, sparse

from app.core.logger import logger
from app.core.environment import settings
from app.api.exceptions import ComplexSpectrumException, DomainException, SolverException
from app.domains.eigen.model import EigenPair, Parity
from app.domains.operators.model import DiscreteOperator
from app.utils.parity import pairing_basis, reflection_indices

EigenMode = Literal['general', 'symmetrized']
Block = Tuple[str, sparse.csr_matrix]


class EigenService:
    """
    Dense eigensolver for the discrete spectrum of a DiscreteOperator below a cutoff.

    The operator is transformed to S = W^{1/2}·A·W^{−1/2}, W the diagonal of 2D weights,
    so that eigenvectors of S are orthonormal in the Euclidean sense exactly when the
    eigenfunctions φ = W^{−1/2}ψ are orthonormal in ⟨·,·⟩_w. Operators that commute with
    the reflections are split into parity blocks before the dense solve.
    """

    def __init__(
        self,
        tol_eig: float = settings.TOL_EIG,
        degeneracy_tol: float = 1e-3,
        mode: EigenMode = 'general',
        parity_tol: float = 1e-8,
        imag_tol: float = 1e-10
    ):
        """
        Initialize the solver.

        Args:
            tol_eig (float): Relative residual tolerance, checked as residual ≤ tol_eig·(|λ| + 1).
            degeneracy_tol (float): Eigenvalues closer than this are tagged degenerate.
            mode (EigenMode): 'general' solves the weighted-similar matrix as is; 'symmetrized'
                solves its symmetric part for operators that are self-adjoint in form.
            parity_tol (float): Threshold of parity_classify.
            imag_tol (float): Largest imaginary part accepted for self-adjoint-in-form operators.
        """
        self.tol_eig = tol_eig
        self.degeneracy_tol = degeneracy_tol
        self.mode = mode
        self.parity_tol = parity_tol
        self.imag_tol = imag_tol

    # --- Structure ---
    def similarity(self, op: DiscreteOperator) -> np.ndarray:
        """Return S = W^{1/2}·A·W^{−1/2}."""
        root = np.sqrt(op.weights)
        return root[:, None] * op.matrix / root[None, :]

    def parity_blocks(self, op: DiscreteOperator) -> List[Block]:
        """
        Orthonormal bases of the invariant parity subspaces of `op`.

        Args:
            op (DiscreteOperator): The operator.

        Returns:
            List[Block]: (label, n × k basis) pairs; a single identity block when the operator
            commutes with neither reflection.
        """
        m = op.grid.m
        x_classes = ('even', 'odd') if op.commutes_with('x') else (None,)
        y_classes = ('even', 'odd') if op.commutes_with('y') else (None,)
        blocks: List[Block] = []
        for py in y_classes:
            for px in x_classes:
                basis_x = sparse.csr_matrix(pairing_basis(m, px)) if px else sparse.identity(m, format='csr')
                basis_y = sparse.csr_matrix(pairing_basis(m, py)) if py else sparse.identity(m, format='csr')
                label = f'x:{px or "any"},y:{py or "any"}'
                blocks.append((label, sparse.kron(basis_y, basis_x, format='csr')))
        logger.debug('%r splits into %d parity block(s)', op, len(blocks))
        return blocks

    @staticmethod
    def compress(S: np.ndarray, basis: sparse.csr_matrix) -> np.ndarray:
        """Return Bᵀ·S·B for an orthonormal basis B."""
        left = np.asarray(basis.T @ S)
        return np.asarray(basis.T @ left.T).T

    # --- Spectrum below the cutoff ---
    def eig_below(
        self,
        op: DiscreteOperator,
        cutoff: Optional[float] = None,
        max_k: int = 10,
        references: Optional[Sequence[np.ndarray]] = None
    ) -> List[EigenPair]:
        """
        All eigenpairs of `op` with eigenvalue strictly below `cutoff`, ascending.

        Args:
            op (DiscreteOperator): The operator.
            cutoff (Optional[float]): Search threshold, at most op.ess_min. Defaults to op.ess_min.
            max_k (int): Largest number of pairs returned. Defaults to 10.
            references (Optional[Sequence[np.ndarray]]): Interior vectors fixing the sign of each
                eigenfunction (the largest-magnitude normalized inner product is made ≥ 0).

        Raises:
            DomainException: If cutoff exceeds the essential-spectrum threshold.
            ComplexSpectrumException: If a self-adjoint-in-form operator yields a complex eigenvalue.
            SolverException: If the dense eigensolver fails.

        Returns:
            List[EigenPair]: Normalized eigenpairs with parity and degeneracy tags.
        """
        cutoff = op.ess_min if cutoff is None else cutoff
        if cutoff > op.ess_min:
            raise DomainException(
                f'Cutoff {cutoff} exceeds the essential-spectrum threshold {op.ess_min} of {op.label.value}.',
                stage='eigen'
            )
        symmetrize = self.mode == 'symmetrized' and op.symmetric_in_form
        logger.info('Solving eigenproblem of %r below %s (mode=%s)', op, cutoff, 'symmetrized' if symmetrize else 'general')

        S = self.similarity(op)
        found: List[Tuple[float, float, np.ndarray]] = []
        try:
            for label, basis in self.parity_blocks(op):
                block = self.compress(S, basis)
                if symmetrize:
                    values, vectors = linalg.eigh(0.5 * (block + block.T))
                    values = values.astype(complex)
                else:
                    values, vectors = linalg.eig(block)
                below = np.flatnonzero(values.real < cutoff)
                logger.debug('Block %s (size %d): %d eigenvalue(s) below %s', label, block.shape[0], below.size, cutoff)
                for index in below:
                    imag = float(values[index].imag)
                    if op.symmetric_in_form and abs(imag) > self.imag_tol:
                        raise ComplexSpectrumException(
                            f'Complex eigenvalue {values[index]:.6g} for self-adjoint-in-form operator {op.label.value}.',
                            details=[{'block': label, 'real': float(values[index].real), 'imag': imag}]
                        )
                    psi = np.asarray(basis @ np.real(vectors[:, index])).ravel()
                    found.append((float(values[index].real), imag, psi))
        except linalg.LinAlgError as exc:
            raise SolverException(f'Dense eigensolver failed for {op.label.value}: {exc}') from exc

        found.sort(key=lambda item: item[0])
        pairs = [self._build_pair(op, value, imag, psi, references) for value, imag, psi in found[:max_k]]
        self._tag_degenerate(pairs)
        logger.info('Eigenvalues of %s below %s: %s', op.label.value, cutoff, [round(p.value, 6) for p in pairs])
        return pairs

    def _build_pair(
        self,
        op: DiscreteOperator,
        value: float,
        imag: float,
        psi: np.ndarray,
        references: Optional[Sequence[np.ndarray]]
    ) -> EigenPair:
        weights = op.weights
        phi = psi / np.sqrt(weights)
        phi /= self.weighted_norm(weights, phi)
        phi *= self._orientation(weights, phi, references)

        residual = self.weighted_norm(weights, op.matrix @ phi - value * phi)
        if residual > self.tol_eig * (abs(value) + 1.0):
            logger.warning('Eigenpair λ=%.6f of %s has residual %.3e above tolerance', value, op.label.value, residual)

        pair = EigenPair(value=value, vector=phi, residual=residual, imag=imag, grid=op.grid)
        return pair.model_copy(update={'parity': self.parity_classify(pair)})

    @staticmethod
    def weighted_norm(weights: np.ndarray, vector: np.ndarray) -> float:
        return float(np.sqrt(np.sum(weights * vector * vector)))

    @staticmethod
    def _orientation(weights: np.ndarray, phi: np.ndarray, references: Optional[Sequence[np.ndarray]]) -> float:
        if references:
            products = [
                np.sum(weights * phi * ref) / np.sqrt(np.sum(weights * ref * ref)) for ref in references
            ]
            anchor = products[int(np.argmax(np.abs(products)))]
        else:
            anchor = phi[int(np.argmax(np.abs(phi)))]
        return -1.0 if anchor < 0 else 1.0

    def _tag_degenerate(self, pairs: List[EigenPair]) -> None:
        for i, pair in enumerate(pairs):
            close = any(
                abs(pair.value - other.value) <= self.degeneracy_tol for j, other in enumerate(pairs) if j != i
            )
            if close:
                pairs[i] = pair.model_copy(update={'degenerate': True})
        tagged = [p.value for p in pairs if p.degenerate]
        if tagged:
            logger.warning('Near-degenerate eigenvalues (within %.1e): %s', self.degeneracy_tol, tagged)

    # --- Parity ---
    def parity_classify(self, pair: EigenPair, tol: Optional[float] = None) -> Parity:
        """
        Classify an eigenfunction as even or odd in x.

        Args:
            pair (EigenPair): Normalized eigenpair.
            tol (Optional[float]): Threshold on the weighted norm of the opposite part.
                Defaults to the service parity tolerance.

        Returns:
            Parity: even_x, odd_x or mixed.
        """
        tol = self.parity_tol if tol is None else tol
        weights = pair.grid.weights_2d
        reflected = pair.vector[reflection_indices(pair.grid.m, 'x')]
        odd = self.weighted_norm(weights, 0.5 * (pair.vector - reflected))
        even = self.weighted_norm(weights, 0.5 * (pair.vector + reflected))
        if odd <= tol:
            return Parity.EVEN_X
        if even <= tol:
            return Parity.ODD_X
        return Parity.MIXED
