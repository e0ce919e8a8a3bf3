"""Job execution service and its HTTP/JSON API."""

from .jobs import (
    InvalidConfig,
    JobNotFound,
    JobRecord,
    JobService,
    JobStatus,
    JobStore,
    run_operation,
)

__all__ = [
    "InvalidConfig",
    "JobNotFound",
    "JobRecord",
    "JobService",
    "JobStatus",
    "JobStore",
    "run_operation",
]
