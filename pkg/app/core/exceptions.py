"""
Error hierarchy
"""
from typing import Optional


class MGTNError(Exception):
    """Base class for all errors raised by this package"""


class ShapeMismatchError(MGTNError, ValueError):
    """Tensor, filter or parameter shapes disagree"""


class InvalidArgumentError(MGTNError, ValueError):
    """An argument is outside its admissible range"""


class GraphError(MGTNError, ValueError):
    """Invalid adjacency, rate table or graph operation"""


class DataValidationError(MGTNError, ValueError):
    """Price data failed validation"""

    def __init__(self, message: str, row: Optional[int] = None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class InsufficientDataError(MGTNError, ValueError):
    """Not enough history, buffer content or split length"""


class CheckpointError(MGTNError, ValueError):
    """Checkpoint cannot be read or does not fit the network"""


class ForwardCacheError(MGTNError, RuntimeError):
    """Backward pass requested without a matching forward cache"""


class EnvironmentTerminalError(MGTNError, RuntimeError):
    """Step requested on a terminal trading environment"""
