import numpy as np
import pytest

from app.api.exceptions import DomainException
from app.domains.operators.model import OperatorLabel

from tests.conftest import A, L, N


def _sech(values):
    return 1.0 / np.cosh(values)


# --- Laplacian ---
def test_laplacian_eigenfunction(operator_service, field_service, grid48):
    mode = field_service.sample(grid48, lambda x, y: np.sin(np.pi * x / L) * np.sin(np.pi * y / L))
    vector = mode.interior_vector()
    laplacian = operator_service.assemble_laplacian(grid48, 1.0, 1.0)
    expected = -2.0 * (np.pi / L) ** 2 * vector
    assert np.max(np.abs(laplacian @ vector - expected)) <= 1e-4


def test_laplacian_anisotropic_coefficients(operator_service, field_service, grid48):
    mode = field_service.sample(grid48, lambda x, y: np.sin(np.pi * x / L) * np.sin(2 * np.pi * y / L))
    vector = mode.interior_vector()
    laplacian = operator_service.assemble_laplacian(grid48, 3.0, 1.0)
    expected = -(3.0 + 4.0) * (np.pi / L) ** 2 * vector
    assert np.max(np.abs(laplacian @ vector - expected)) <= 1e-4


def test_laplacian_with_zero_coefficients(operator_service, grid48):
    laplacian = operator_service.assemble_laplacian(grid48, 0.0, 0.0)
    assert laplacian.shape == ((N - 1) ** 2, (N - 1) ** 2)
    assert not laplacian.any()


# --- Structure ---
@pytest.mark.parametrize('name', ['L_op', 'B2', 'M', 'M_bar'])
def test_operators_commute_with_reflections(request, name):
    op = request.getfixturevalue(name)
    assert op.commutes_with('x')
    assert op.commutes_with('y')


def test_operator_metadata(L_op, B2, M, M_bar):
    assert (L_op.label, L_op.ess_min, L_op.symmetric_in_form) == (OperatorLabel.L_OP, 1.0, True)
    assert (B2.label, B2.ess_min) == (OperatorLabel.B2, 1.0)
    assert (M.label, M.ess_min, M.symmetric_in_form) == (OperatorLabel.M, 1.0, True)
    assert (M_bar.label, M_bar.symmetric_in_form) == (OperatorLabel.M_BAR, False)
    assert M.n == (N - 1) ** 2


def test_virial_operator_is_sum_of_parts(operator_service, Q, Qx, B2, M):
    projection = operator_service.virial_projection(Q, Qx)
    np.testing.assert_array_equal(M.matrix, B2.matrix + projection.matrix)


def test_virial_operator_computes_derivative_when_missing(operator_service, Q, M):
    np.testing.assert_array_equal(operator_service.assemble_M(Q).matrix, M.matrix)


# --- Identities of the linearized operator ---
def test_linearized_operator_identities(operator_service, Q, Qx, Qy, L_op):
    residuals = operator_service.identity_residuals(Q, Qx, Qy, L_op)
    assert residuals['LQ'] <= 1e-4
    assert residuals['LLambdaQ'] <= 1e-3
    assert residuals['LQx'] <= 1e-3


# --- Projections ---
def test_projection_ranks(operator_service, Q, Qx):
    symmetric = operator_service.virial_projection(Q, Qx, self_adjoint=True)
    plain = operator_service.virial_projection(Q, Qx, self_adjoint=False)
    assert symmetric.label == OperatorLabel.P2
    assert plain.label == OperatorLabel.P2BAR
    assert np.linalg.matrix_rank(symmetric.matrix) == 2
    assert np.linalg.matrix_rank(plain.matrix) == 1


def test_projection_annihilates_even_functions(operator_service, Q, Qx):
    projection = operator_service.virial_projection(Q, Qx)
    assert np.max(np.abs(projection.matrix @ Q.interior_vector())) <= 1e-12


def test_projection_forms_share_quadratic_form(operator_service, grid48, Q, Qx, rng):
    symmetric = operator_service.virial_projection(Q, Qx, self_adjoint=True)
    plain = operator_service.virial_projection(Q, Qx, self_adjoint=False)
    weights = grid48.weights_2d
    for _ in range(3):
        v = rng.standard_normal(weights.size)
        assert np.sum(weights * (symmetric.matrix @ v) * v) == pytest.approx(
            np.sum(weights * (plain.matrix @ v) * v), rel=1e-10, abs=1e-12
        )


def test_symmetric_projection_is_weighted_self_adjoint(operator_service, grid48, Q, Qx):
    projection = operator_service.virial_projection(Q, Qx)
    weighted = grid48.weights_2d[:, None] * projection.matrix
    np.testing.assert_allclose(weighted, weighted.T, atol=1e-14 * np.max(np.abs(weighted)))


def test_virial_operator_is_weighted_self_adjoint_on_smooth_functions(field_service, grid48, M):
    u = field_service.sample(grid48, lambda x, y: _sech(x) * _sech(y) * (1.0 + 0.5 * x)).interior_vector()
    v = field_service.sample(grid48, lambda x, y: np.sin(x) * _sech(x) * _sech(1.5 * y)).interior_vector()
    weights = grid48.weights_2d
    left = np.sum(weights * (M.matrix @ u) * v)
    right = np.sum(weights * u * (M.matrix @ v))
    scale = np.sqrt(np.sum(weights * u * u) * np.sum(weights * v * v))
    assert abs(left - right) <= 1e-5 * scale


def test_projection_rejects_fields_on_other_grid(operator_service, field_service, grid_service, Q, grid48):
    coarse = grid_service.build_grid(16, L, A)
    other = field_service.sample(coarse, lambda x, y: np.exp(-x * x - y * y))
    with pytest.raises(DomainException) as error:
        operator_service.assemble_projection(Q, other, grid48, self_adjoint=True)
    assert error.value.stage == 'operators'


def test_virial_operator_rejects_other_grid(operator_service, grid_service, Q):
    with pytest.raises(DomainException):
        operator_service.assemble_M(Q, grid=grid_service.build_grid(16, L, A))
