from enum import Enum
from typing import Annotated, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from app.domains.eigen.model import EigenPair


class Verdict(str, Enum):
    POSITIVE = 'positive'
    NOT_CERTIFIED = 'not-certified'


class GridParams(BaseModel):
    """Grid parameters recorded in a report."""
    N: int
    L: float
    a: float


class AngleTable(BaseModel):
    """|⟨φ_i, Q/‖Q‖⟩_w| and |⟨φ_i, Q_x/‖Q_x‖⟩_w| for every reported eigenfunction."""
    Q: List[Annotated[float, Field(ge=0.0, le=1.0)]] = Field(default_factory=list)
    Qx: List[Annotated[float, Field(ge=0.0, le=1.0)]] = Field(default_factory=list)


class CoercivityBounds(BaseModel):
    """Per-parity lower bounds of the quadratic form; overall is their minimum."""
    odd: Optional[float] = None
    even: Optional[float] = None
    overall: Optional[float] = None


# --- Output Schema ---
class SpectralReport(BaseModel):
    """
    Outcome of eigensolving and certifying one operator.

    Eigenfunctions are kept on the instance for plot emission and excluded from the JSON document.
    """
    operator: str
    grid: GridParams
    cutoff: float
    scale: float = 1.0
    eigenvalues: List[float] = Field(default_factory=list)
    certified_eigenvalues: List[float] = Field(default_factory=list)
    residuals: List[float] = Field(default_factory=list)
    parities: List[str] = Field(default_factory=list)
    degenerate: List[bool] = Field(default_factory=list)
    angles: AngleTable = Field(default_factory=AngleTable)
    bounds: CoercivityBounds = Field(default_factory=CoercivityBounds)
    verdict: Verdict = Verdict.NOT_CERTIFIED
    flags: List[str] = Field(default_factory=list)
    c1_estimate: Optional[float] = None
    tolerances: Dict[str, float] = Field(default_factory=dict)
    wall_time_s: float = 0.0
    pairs: List[EigenPair] = Field(default_factory=list, exclude=True)

    model_config = ConfigDict(arbitrary_types_allowed=True)
