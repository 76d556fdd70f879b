from typing import Optional


class SatEnqError(Exception):
    """Base class for every error raised by the package"""


class ShapeError(SatEnqError, ValueError):
    """Array dimensions do not agree"""


class NumericError(SatEnqError, ArithmeticError):
    """NaN/Inf encountered, or an iteration failed to converge"""


class ContractError(SatEnqError, RuntimeError):
    """A caller broke an operation's precondition"""


class ConfigError(SatEnqError, ValueError):
    """Configuration failed validation"""

    def __init__(self, message: str, field_path: Optional[str] = None):
        self.field_path = field_path
        if field_path:
            message = f"{field_path}: {message}"
        super().__init__(message)
