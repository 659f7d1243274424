import numpy as np
import pytest

from app.domains.certify.service import CertifyService
from app.domains.eigen.service import EigenService
from app.domains.field2d.service import Field2DService
from app.domains.ground_state.service import GroundStateService
from app.domains.operators.service import OperatorService
from app.domains.spectral_grid.service import SpectralGridService

L = 20.0
A = 4.0
N = 48
RADIAL_NODES = 8001


# --- Services ---
@pytest.fixture(scope='session')
def ground_state_service():
    return GroundStateService()


@pytest.fixture(scope='session')
def grid_service():
    return SpectralGridService()


@pytest.fixture(scope='session')
def field_service():
    return Field2DService()


@pytest.fixture(scope='session')
def operator_service(field_service):
    return OperatorService(field_service)


@pytest.fixture(scope='session')
def eigen_service():
    return EigenService(tol_eig=1e-8)


@pytest.fixture(scope='session')
def certify_service(eigen_service, field_service):
    return CertifyService(eigen_service, field_service)


# --- Radial ground state ---
@pytest.fixture(scope='session')
def profile(ground_state_service):
    return ground_state_service.solve_radial(L, RADIAL_NODES, tol=1e-10)


@pytest.fixture(scope='session')
def oracle(ground_state_service):
    return ground_state_service.shoot_radial(L, 1.0, 4.0, 1e-12, n_nodes=RADIAL_NODES)


# --- Grid and fields at N=48 ---
@pytest.fixture(scope='session')
def grid48(grid_service):
    return grid_service.build_grid(N, L, A)


@pytest.fixture(scope='session')
def Q(field_service, profile, grid48):
    return field_service.radial_to_field(profile, grid48)


@pytest.fixture(scope='session')
def Qx(operator_service, Q):
    return operator_service.derivative_x(Q)


@pytest.fixture(scope='session')
def Qy(operator_service, Q):
    return operator_service.derivative_y(Q)


@pytest.fixture(scope='session')
def references(Q, Qx, Qy):
    return [Q.interior_vector(), Qx.interior_vector(), Qy.interior_vector()]


# --- Operators ---
@pytest.fixture(scope='session')
def L_op(operator_service, Q):
    return operator_service.assemble_L(Q)


@pytest.fixture(scope='session')
def B2(operator_service, Q, Qx):
    return operator_service.assemble_B2(Q, Qx)


@pytest.fixture(scope='session')
def M(operator_service, Q, Qx):
    return operator_service.assemble_M(Q, Qx=Qx)


@pytest.fixture(scope='session')
def M_bar(operator_service, Q, Qx):
    return operator_service.assemble_M(Q, Qx=Qx, self_adjoint=False)


@pytest.fixture(scope='session')
def M_pairs(eigen_service, M, references):
    return eigen_service.eig_below(M, 1.0, 10, references)


@pytest.fixture(scope='session')
def rng():
    return np.random.default_rng(20240611)
