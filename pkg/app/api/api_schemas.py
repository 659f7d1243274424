from datetime import datetime, timezone
from typing import Any, Generic, List, Literal, Optional, TypeVar

from pydantic import BaseModel, Field

T = TypeVar('T')


def _utc_now() -> datetime:
    return datetime.now(timezone.utc)


# --- Success Document ---
class ResponseSchema(BaseModel, Generic[T]):
    """
    Envelope printed on stdout by `--json` commands.

    Attributes:
        status (str): Always 'success'.
        command (str): CLI command that produced the payload.
        timestamp (datetime): UTC creation time.
        data (T): Command payload, e.g. the list of spectral reports.
    """
    status: Literal['success'] = 'success'
    command: str
    timestamp: datetime = Field(default_factory=_utc_now)
    data: T


# --- Error Document ---
class ErrorSchema(BaseModel):
    """
    Document written to stderr when a command fails.

    `stage` names the pipeline step (grid, fields, eigen, ...) the failure is attributed to;
    `error` is the exception class name.
    """
    status: Literal['error'] = 'error'
    error: str
    stage: str
    message: str
    exit_code: int
    timestamp: datetime = Field(default_factory=_utc_now)
    details: Optional[List[Any]] = None
