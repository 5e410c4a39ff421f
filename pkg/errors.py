"""Exception hierarchy for the SDS engine."""

from typing import Any, List, Optional, Tuple


class SdsEngineError(Exception):
    """Base class for every error raised by the engine."""


class GroupConstructionError(SdsEngineError, ValueError):
    """Malformed group spec: n = 0, non-prime p, reducible modulus."""

    def __init__(self, message: str, factor: Optional[List[int]] = None):
        super().__init__(message)
        self.factor = factor


class UnsupportedOperationError(SdsEngineError, TypeError):
    """Operation not defined for this kind of group (e.g. field_mul on Z_n)."""


class CapacityError(SdsEngineError):
    """Exhaustive enumeration requested above the configured bound."""

    def __init__(self, message: str, bound: int):
        super().__init__(message)
        self.bound = bound


class MixedGroupsError(SdsEngineError, ValueError):
    """Blocks or matrices over different groups were combined."""


class InvalidParametersError(SdsEngineError, ValueError):
    """Parameters outside an operation's domain."""


class FormatError(SdsEngineError, ValueError):
    """Text input could not be parsed."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class PipelineError(SdsEngineError):
    """A construction pipeline stage did not produce the expected artifact."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"stage '{stage}': {message}")
        self.stage = stage


class RdsError(SdsEngineError):
    """Set is not a relative difference set."""

    def __init__(self, message: str, residue: int, count: int):
        super().__init__(message)
        self.residue = residue
        self.count = count


class BibdError(SdsEngineError):
    """Developed design does not cover point pairs uniformly."""

    def __init__(self, message: str, pair: Tuple[int, int], count: int):
        super().__init__(message)
        self.pair = pair
        self.count = count


class SearchBudgetExceeded(SdsEngineError):
    """Search stopped after expanding the configured number of nodes."""

    def __init__(self, message: str, partial: List[Any], completed_share: float, nodes: int):
        super().__init__(message)
        self.partial = partial
        self.completed_share = completed_share
        self.nodes = nodes


class VerificationError(SdsEngineError):
    """Block family failed SDS verification; carries the VerificationResult."""

    def __init__(self, message: str, result: Any):
        super().__init__(message)
        self.result = result
