"""
Standardized Error Models

Provides consistent error types for the scheduling simulator.
Every error carries a machine-readable code, a human-readable message and
optional context so the CLI can report it and exit with a stable status.
"""

from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class ErrorCode(str, Enum):
    """Standard error codes."""

    CONFIGURATION_ERROR = "configuration_error"
    DOMAIN_ERROR = "domain_error"
    USAGE_ERROR = "usage_error"
    SNAPSHOT_ERROR = "snapshot_error"


class ErrorReport(BaseModel):
    """
    Serializable error description.

    Printed by the CLI when a command fails on bad input.
    """

    error_code: ErrorCode = Field(..., description="Machine-readable error code")
    message: str = Field(..., description="Human-readable error message")
    details: List[str] = Field(
        default_factory=list,
        description="One line per individual problem (e.g. config violations)"
    )
    context: Dict[str, Any] = Field(
        default_factory=dict,
        description="Additional context for debugging"
    )


class FedJobsError(Exception):
    """Base class for all simulator errors."""

    code: ErrorCode = ErrorCode.USAGE_ERROR

    def __init__(
        self,
        message: str,
        details: Optional[List[str]] = None,
        **context: Any
    ):
        super().__init__(message)
        self.message = message
        self.details = list(details or [])
        self.context = context

    def to_report(self) -> ErrorReport:
        """Convert to a serializable report."""
        return ErrorReport(
            error_code=self.code,
            message=self.message,
            details=self.details,
            context={k: str(v) for k, v in self.context.items()},
        )


class ConfigurationError(FedJobsError):
    """Config document unreadable, malformed, or violating invariants."""

    code = ErrorCode.CONFIGURATION_ERROR


class DomainError(FedJobsError):
    """A computation was asked about an empty or inconsistent domain (e.g. empty N_m)."""

    code = ErrorCode.DOMAIN_ERROR


class UsageError(FedJobsError):
    """Caller asked for something that does not exist (unknown scheduler, job id, ...)."""

    code = ErrorCode.USAGE_ERROR


class SnapshotError(FedJobsError):
    """A state snapshot could not be read back."""

    code = ErrorCode.SNAPSHOT_ERROR
