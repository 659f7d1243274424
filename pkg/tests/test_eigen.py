import numpy as np
import pytest

from app.api.exceptions import ComplexSpectrumException, DomainException
from app.domains.eigen.model import EigenPair, Parity
from app.domains.eigen.service import EigenService
from app.domains.operators.model import DiscreteOperator, OperatorLabel

from tests.conftest import A, L, N


def _rotation_operator(grid, symmetric_in_form):
    n = grid.m ** 2
    matrix = 5.0 * np.eye(n)
    matrix[:2, :2] = [[-1.0, -2.0], [2.0, -1.0]]
    return DiscreteOperator(matrix=matrix, label=OperatorLabel.M_BAR, symmetric_in_form=symmetric_in_form, ess_min=1.0, grid=grid)


# --- Virial operator ---
def test_virial_operator_eigenvalues(M_pairs):
    assert len(M_pairs) == 2
    assert M_pairs[0].value == pytest.approx(-1.0735, abs=5e-4)
    assert M_pairs[1].value == pytest.approx(-0.2151, abs=5e-4)


def test_virial_operator_parities(M_pairs):
    assert M_pairs[0].parity == Parity.ODD_X
    assert M_pairs[1].parity == Parity.EVEN_X
    assert not any(pair.degenerate for pair in M_pairs)


def test_eigenpairs_are_accurate(M_pairs):
    for pair in M_pairs:
        assert pair.residual <= 1e-8 * (abs(pair.value) + 1.0)
        assert abs(pair.imag) <= 1e-10


def test_eigenfunctions_are_weighted_orthonormal(M_pairs, grid48):
    weights = grid48.weights_2d
    gram = np.array([[np.sum(weights * p.vector * q.vector) for q in M_pairs] for p in M_pairs])
    np.testing.assert_allclose(gram, np.eye(len(M_pairs)), atol=1e-10)


def test_eigenfunctions_follow_reference_orientation(M_pairs, references, grid48):
    weights = grid48.weights_2d
    assert np.sum(weights * M_pairs[0].vector * references[1]) > 0
    assert np.sum(weights * M_pairs[1].vector * references[0]) > 0


def test_symmetrized_mode_agrees(M):
    pairs = EigenService(tol_eig=1e-8, mode='symmetrized').eig_below(M, 1.0)
    assert [p.value for p in pairs] == pytest.approx([-1.0735, -0.2151], abs=5e-4)


# --- Related operators ---
def test_linearized_operator_spectrum(eigen_service, L_op, references):
    pairs = eigen_service.eig_below(L_op, 1.0, 10, references)
    assert pairs[0].value == pytest.approx(-5.4122, abs=5e-4)
    assert pairs[0].parity == Parity.EVEN_X
    kernel = pairs[1:3]
    assert all(abs(pair.value) <= 1e-3 for pair in kernel)
    assert all(pair.degenerate for pair in kernel)
    assert {pair.parity for pair in kernel} == {Parity.ODD_X, Parity.EVEN_X}
    assert all(pair.value > 1e-3 for pair in pairs[3:])


def test_linearized_operator_without_ground_state(eigen_service, operator_service, Q):
    free = operator_service.assemble_L(Q.with_values(np.zeros_like(Q.values)))
    assert eigen_service.eig_below(free, 1.0) == []


def test_twice_b_has_one_negative_direction(eigen_service, B2, references):
    pairs = eigen_service.eig_below(B2, 1.0, 10, references)
    assert len(pairs) == 1
    assert pairs[0].value == pytest.approx(-0.2151, abs=5e-4)
    assert pairs[0].parity == Parity.EVEN_X


def test_non_self_adjoint_variant(eigen_service, M_bar, references):
    pairs = eigen_service.eig_below(M_bar, 1.0, 10, references)
    assert [p.value for p in pairs] == pytest.approx([-0.2151, 0.3580], abs=5e-4)
    assert [p.parity for p in pairs] == [Parity.EVEN_X, Parity.ODD_X]


def test_rank_two_perturbation_interlacing(eigen_service, B2, M):
    below_m = len(eigen_service.eig_below(M, 1.0, 50))
    below_b = len(eigen_service.eig_below(B2, 1.0, 50))
    assert abs(below_m - below_b) <= 2


def test_max_k_truncates(eigen_service, M, M_pairs):
    pairs = eigen_service.eig_below(M, 1.0, 1)
    assert len(pairs) == 1
    assert pairs[0].value == pytest.approx(M_pairs[0].value, abs=1e-12)


# --- Errors ---
def test_cutoff_above_essential_spectrum(eigen_service, M):
    with pytest.raises(DomainException) as error:
        eigen_service.eig_below(M, 1.5)
    assert error.value.stage == 'eigen'


def test_complex_eigenvalue_of_self_adjoint_operator(eigen_service, grid_service):
    grid = grid_service.build_grid(4, L, A)
    with pytest.raises(ComplexSpectrumException) as error:
        eigen_service.eig_below(_rotation_operator(grid, symmetric_in_form=True), 1.0)
    assert error.value.exit_code == 3


def test_complex_eigenvalue_of_non_self_adjoint_operator(eigen_service, grid_service):
    grid = grid_service.build_grid(4, L, A)
    pairs = eigen_service.eig_below(_rotation_operator(grid, symmetric_in_form=False), 1.0)
    assert [p.value for p in pairs] == pytest.approx([-1.0, -1.0])
    assert sorted(abs(p.imag) for p in pairs) == pytest.approx([2.0, 2.0])
    assert all(p.degenerate for p in pairs)


# --- Parity ---
def test_constant_function_is_even(eigen_service, grid48):
    pair = EigenPair(value=0.0, vector=np.ones((N - 1) ** 2), residual=0.0, grid=grid48)
    assert eigen_service.parity_classify(pair) == Parity.EVEN_X


def test_parity_classification(eigen_service, field_service, grid48):
    odd = field_service.sample(grid48, lambda x, y: x * np.exp(-x * x - y * y)).interior_vector()
    mixed = field_service.sample(grid48, lambda x, y: (1.0 + x) * np.exp(-x * x - y * y)).interior_vector()
    assert eigen_service.parity_classify(EigenPair(value=0.0, vector=odd, residual=0.0, grid=grid48)) == Parity.ODD_X
    assert eigen_service.parity_classify(EigenPair(value=0.0, vector=mixed, residual=0.0, grid=grid48)) == Parity.MIXED


def test_parity_blocks_cover_the_space(eigen_service, M):
    blocks = eigen_service.parity_blocks(M)
    assert len(blocks) == 4
    assert sum(basis.shape[1] for _, basis in blocks) == M.n


# --- Resolution ---
@pytest.mark.slow
@pytest.mark.parametrize('steepness', [4.0, 5.0])
def test_eigenvalues_stable_across_resolutions(grid_service, field_service, operator_service, eigen_service, profile, M_pairs, steepness):
    reference = [p.value for p in M_pairs]
    for degree in (32, 48, 64):
        grid = grid_service.build_grid(degree, L, steepness)
        Q = field_service.radial_to_field(profile, grid)
        values = [p.value for p in eigen_service.eig_below(operator_service.assemble_M(Q), 1.0)]
        # compared with a=4, N=48
        assert values == pytest.approx(reference, abs=1e-4)
