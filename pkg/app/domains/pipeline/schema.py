from enum import Enum
from pathlib import Path
from typing import Annotated, Any, Dict, Literal, Optional

import yaml
from pydantic import BaseModel, Field, field_validator

from app.core.environment import settings
from app.api.exceptions import ConfigurationException


class OperatorSelector(str, Enum):
    """Operators a run can analyse."""
    M = 'M'
    B2 = 'B2'
    L_OP = 'L_op'
    P2BAR = 'P2bar'
    ALL = 'all'


# --- Input Schema ---
class RunConfig(BaseModel):
    """Configuration of one pipeline run; defaults reproduce L=20, a=4, N=48."""
    L: Annotated[float, Field(gt=0.0, description='Half-width of the computational square')] = settings.DEFAULT_L
    a: Annotated[float, Field(gt=0.0, description='Steepness of the grid mapping')] = settings.DEFAULT_A
    N: Annotated[int, Field(ge=4, description='Chebyshev degree, even')] = settings.DEFAULT_N
    radial_nodes: Annotated[int, Field(ge=200, description='Radial grid size')] = settings.RADIAL_NODES
    operator: OperatorSelector = OperatorSelector.M
    tol_eig: Annotated[float, Field(gt=0.0)] = settings.TOL_EIG
    tol_radial: Annotated[float, Field(gt=0.0)] = settings.TOL_RADIAL
    max_k: Annotated[int, Field(ge=1)] = 10
    eig_mode: Literal['general', 'symmetrized'] = 'general'
    out: Path = Path(settings.OUTPUT_DIR)
    cache_dir: Path = Path(settings.CACHE_DIR)
    use_cache: bool = True
    emit_slices: bool = False
    dump_matrices: bool = False
    require_positive: bool = False

    @field_validator('N')
    @classmethod
    def _even_degree(cls, value: int) -> int:
        if value % 2:
            raise ValueError('N must be even')
        return value

    @classmethod
    def from_sources(cls, config_file: Optional[Path] = None, overrides: Optional[Dict[str, Any]] = None) -> 'RunConfig':
        """
        Merge settings defaults, an optional YAML or JSON file and command-line overrides.

        Flags win over the file, the file wins over the defaults; None overrides are ignored.

        Args:
            config_file (Optional[Path]): Structured config file. Defaults to None.
            overrides (Optional[Dict[str, Any]]): Values given on the command line. Defaults to None.

        Raises:
            ConfigurationException: If the file cannot be read or is not a mapping.
            ValidationError: If a merged value violates a constraint.

        Returns:
            RunConfig: The validated configuration.
        """
        values: Dict[str, Any] = {}
        if config_file is not None:
            try:
                loaded = yaml.safe_load(Path(config_file).read_text(encoding='utf-8'))
            except (OSError, yaml.YAMLError) as exc:
                raise ConfigurationException(f'Cannot load config file {config_file}: {exc}') from exc
            if loaded is not None and not isinstance(loaded, dict):
                raise ConfigurationException(f'Config file {config_file} must hold a mapping.')
            values.update(loaded or {})
        values.update({key: value for key, value in (overrides or {}).items() if value is not None})
        return cls.model_validate(values)
