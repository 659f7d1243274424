import numpy as np
import pytest
from pydantic import ValidationError
from scipy.interpolate import PchipInterpolator

from app.api.exceptions import DomainException
from app.domains.field2d.model import TensorField
from app.utils.parity import even_part, odd_part

from tests.conftest import A, L, N


# --- Radial interpolation ---
def test_ground_state_at_origin(Q, profile):
    assert Q.values[N // 2, N // 2] == pytest.approx(profile.values[0], abs=1e-12)


def test_ground_state_at_corner(Q):
    assert Q.values[0, 0] <= 1e-10
    assert Q.values[N, N] <= 1e-10


def test_ground_state_is_nonnegative(Q):
    assert Q.values.min() >= 0.0


def test_ground_state_symmetries(Q):
    np.testing.assert_array_equal(Q.values, Q.values.T)
    np.testing.assert_array_equal(Q.values, Q.values[::-1, ::-1])
    np.testing.assert_array_equal(Q.values, Q.values[::-1, :])


def test_radial_to_field_rejects_short_profile(field_service, grid_service, profile):
    wide = grid_service.build_grid(16, 25.0, A)
    with pytest.raises(DomainException) as error:
        field_service.radial_to_field(profile, wide)
    assert error.value.stage == 'fields'


# --- Differentiation ---
def test_derivative_vanishes_on_symmetry_axis(Qx, Qy):
    np.testing.assert_array_equal(Qx.values[N // 2, :], 0.0)
    np.testing.assert_array_equal(Qy.values[:, N // 2], 0.0)


def test_derivative_of_coordinate(field_service, grid48):
    X = field_service.sample(grid48, lambda x, y: x)
    np.testing.assert_allclose(field_service.dx(X).values, 1.0, atol=1e-8)
    np.testing.assert_allclose(field_service.dy(X).values, 0.0, atol=1e-8)


def test_derivative_matches_radial_chain_rule(field_service, grid48, Qx, profile):
    X, Y = field_service.mesh(grid48)
    radius = np.sqrt(X * X + Y * Y)
    away = radius > 0
    expected = np.zeros_like(radius)
    expected[away] = X[away] / radius[away] * PchipInterpolator(profile.nodes, profile.deriv)(radius[away])
    assert np.max(np.abs(Qx.values - expected)[1:N, 1:N]) <= 1e-5


def test_derivatives_are_transposes(Qx, Qy):
    np.testing.assert_allclose(Qx.values, Qy.values.T, atol=1e-11)


def test_scaling_generator_is_orthogonal_to_ground_state(field_service, ground_state_service, Q, Qx, Qy, oracle):
    mass = ground_state_service.radial_diagnostics(oracle).mass
    lambda_q = field_service.lambda_q(Q, Qx, Qy)
    assert abs(field_service.inner(Q, lambda_q)) <= 1e-6 * mass


# --- Inner product ---
def test_weighted_mass(field_service, ground_state_service, Q, oracle):
    mass = ground_state_service.radial_diagnostics(oracle).mass
    assert field_service.inner(Q, Q) == pytest.approx(mass, abs=1e-4)
    assert field_service.norm(Q) == pytest.approx(np.sqrt(mass), abs=1e-4)


def test_inner_vectors_matches_field_inner(field_service, grid48, Q, Qx):
    from_vectors = field_service.inner_vectors(grid48, Q.interior_vector(), Qx.interior_vector())
    assert from_vectors == pytest.approx(field_service.inner(Q, Qx), abs=1e-12)


def test_inner_rejects_mismatched_grids(field_service, grid_service, Q):
    other = field_service.sample(grid_service.build_grid(16, L, A), lambda x, y: np.exp(-x * x - y * y))
    with pytest.raises(DomainException):
        field_service.inner(Q, other)


# --- Parity ---
def test_parity_projections(field_service, Q, Qx):
    np.testing.assert_array_equal(field_service.odd_x(Q).values, 0.0)
    np.testing.assert_array_equal(field_service.even_x(Q).values, Q.values)
    np.testing.assert_array_equal(field_service.even_x(Qx).values, 0.0)
    np.testing.assert_array_equal(field_service.odd_x(Qx).values, Qx.values)
    np.testing.assert_array_equal(field_service.odd_y(Qx).values, 0.0)


def test_parity_projections_are_complementary(field_service, grid48):
    field = field_service.sample(grid48, lambda x, y: np.exp(-(x - 1.0) ** 2 - 0.5 * (y + 2.0) ** 2) + 0.3 * x)
    for project in (field_service.odd_x, field_service.even_x, field_service.odd_y, field_service.even_y):
        once = project(field)
        np.testing.assert_array_equal(project(once).values, once.values)
    odd, even = field_service.odd_x(field), field_service.even_x(field)
    np.testing.assert_array_equal(field_service.odd_x(even).values, 0.0)
    np.testing.assert_array_equal(field_service.even_x(odd).values, 0.0)
    scale = np.abs(field.values).max()
    np.testing.assert_allclose(odd.values + even.values, field.values, rtol=0.0, atol=4.0 * np.finfo(float).eps * scale)


def test_parity_projection_matrices(grid48):
    identity = np.eye(grid48.N + 1)
    P_odd, P_even = odd_part(identity), even_part(identity)
    np.testing.assert_array_equal(P_odd + P_even, identity)
    np.testing.assert_array_equal(P_odd @ P_odd, P_odd)
    np.testing.assert_array_equal(P_even @ P_even, P_even)
    np.testing.assert_array_equal(P_odd @ P_even, 0.0)


# --- Model ---
def test_interior_embedding(grid48, Q):
    vector = Q.interior_vector()
    assert vector.shape == ((N - 1) ** 2,)
    assert vector[0] == Q.values[1, 1]
    assert vector[1] == Q.values[2, 1]
    embedded = TensorField.from_interior(grid48, vector)
    np.testing.assert_array_equal(embedded.values[1:N, 1:N], Q.values[1:N, 1:N])
    assert np.all(embedded.values[0, :] == 0.0)


def test_field_rejects_wrong_shape(grid48):
    with pytest.raises(ValidationError):
        TensorField(grid=grid48, values=np.zeros((N, N)))
