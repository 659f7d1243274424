from typing import Any, Dict, List, Optional

class ToolkitException(Exception):
    """Base exception for every failure raised by the toolkit.

    Attributes:
        stage (str): Pipeline stage the failure belongs to.
        message (str): Human-readable description.
        details (List[Dict[str, Any]]): Structured context for the error report.
        exit_code (int): Process exit status used by the command line.
    """
    exit_code: int = 1
    default_stage: str = 'internal'

    def __init__(self, message: str, stage: Optional[str] = None, details: Optional[List[Dict[str, Any]]] = None):
        """Initialize the exception with its stage and details.

        Args:
            message (str): Human-readable description of the failure.
            stage (Optional[str]): Pipeline stage. Defaults to the class stage.
            details (Optional[List[Dict[str, Any]]]): Structured context. Defaults to None.
        """
        self.message = message
        self.stage = stage or self.default_stage
        self.details = details or []
        super().__init__(self.message)


class ConfigurationException(ToolkitException):
    """Invalid run configuration (flags, config file or settings)."""
    exit_code = 2
    default_stage = 'config'


class ConvergenceException(ToolkitException):
    """An iterative solver did not converge or collapsed."""
    exit_code = 3
    default_stage = 'ground_state'


class BracketException(ToolkitException):
    """Shooting bracket does not straddle the decaying solution."""
    exit_code = 3
    default_stage = 'ground_state'

    def __init__(self, amp_lo: float, amp_hi: float, lo_kind: str, hi_kind: str):
        """Initialize the exception with the offending bracket.

        Args:
            amp_lo (float): Lower initial amplitude.
            amp_hi (float): Upper initial amplitude.
            lo_kind (str): Classification of the lower trajectory.
            hi_kind (str): Classification of the upper trajectory.
        """
        self.amp_lo = amp_lo
        self.amp_hi = amp_hi
        super().__init__(
            f'Bracket ({amp_lo}, {amp_hi}) does not straddle the separatrix: {lo_kind} / {hi_kind}.',
            details=[{'amp_lo': amp_lo, 'lo': lo_kind, 'amp_hi': amp_hi, 'hi': hi_kind}]
        )


class SolverException(ToolkitException):
    """Dense eigensolver failure."""
    exit_code = 3
    default_stage = 'eigen'


class ComplexSpectrumException(ToolkitException):
    """Complex eigenvalue below the cutoff of an operator that is self-adjoint in form."""
    exit_code = 3
    default_stage = 'eigen'


class DomainException(ToolkitException):
    """Precondition violation: bad grid, mismatched fields, radius outside a profile."""
    exit_code = 1
    default_stage = 'internal'


class ConstraintRankException(ToolkitException):
    """Constraint set is rank deficient or leaves no admissible subspace."""
    exit_code = 1
    default_stage = 'certify'


class CertificationException(ToolkitException):
    """The coercivity verdict is negative or the angle split cannot be applied."""
    exit_code = 4
    default_stage = 'certify'


class StorageException(ToolkitException):
    """Reading or writing an artifact failed."""
    exit_code = 1
    default_stage = 'report'
