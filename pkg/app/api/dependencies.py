from app.core.logger import logger
from app.domains.certify.service import CertifyService
from app.domains.eigen.service import EigenService, EigenMode
from app.domains.field2d.service import Field2DService
from app.domains.ground_state.service import GroundStateService
from app.domains.operators.service import OperatorService
from app.domains.pipeline.schema import RunConfig
from app.domains.pipeline.service import PipelineService
from app.domains.spectral_grid.service import SpectralGridService


# --- Services dependencies ---
def get_ground_state_service() -> GroundStateService:
    """
    Provide a GroundStateService instance.

    Returns:
        GroundStateService: Service instance.
    """
    service = GroundStateService()
    logger.debug('GroundStateService instance created: %s', service)
    return service


def get_grid_service() -> SpectralGridService:
    """
    Provide a SpectralGridService instance.

    Returns:
        SpectralGridService: Service instance.
    """
    return SpectralGridService()


def get_field_service() -> Field2DService:
    return Field2DService()


def get_operator_service(field_service: Field2DService) -> OperatorService:
    """
    Provide an OperatorService bound to a field service.

    Args:
        field_service (Field2DService): Field operations.

    Returns:
        OperatorService: Service instance.
    """
    service = OperatorService(field_service)
    logger.debug('OperatorService instance created with field service: %s', field_service)
    return service


def get_eigen_service(tol_eig: float, mode: EigenMode = 'general') -> EigenService:
    """
    Provide an EigenService configured with a residual tolerance and solve mode.

    Args:
        tol_eig (float): Eigenpair residual tolerance.
        mode (EigenMode): 'general' or 'symmetrized'.

    Returns:
        EigenService: Service instance.
    """
    service = EigenService(tol_eig=tol_eig, mode=mode)
    logger.debug('EigenService instance created: tol=%.1e, mode=%s', tol_eig, mode)
    return service


def get_certify_service(eigen_service: EigenService, field_service: Field2DService) -> CertifyService:
    return CertifyService(eigen_service, field_service)


def get_pipeline_service(config: RunConfig) -> PipelineService:
    """
    Provide a PipelineService wired for one run configuration.

    Args:
        config (RunConfig): Validated configuration.

    Returns:
        PipelineService: Service instance.
    """
    fields = get_field_service()
    eigen = get_eigen_service(config.tol_eig, config.eig_mode)
    service = PipelineService(
        config=config,
        ground_state=get_ground_state_service(),
        grids=get_grid_service(),
        fields=fields,
        operators=get_operator_service(fields),
        eigen=eigen,
        certify=get_certify_service(eigen, fields)
    )
    logger.debug('PipelineService instance created for N=%d, operator=%s', config.N, config.operator.value)
    return service
