"""
Data models for the multi-job scheduling simulator.
"""

from fedjobs.models.domain import (
    ClientProfile,
    DataRegime,
    DatasetHolding,
    JobSpec,
    JobState,
    JsiQueueMode,
    OracleParams,
    PopulationGroup,
    QueueState,
    SchedulerKind,
    SimConfig,
    SimulationState,
    TieRule,
)
from fedjobs.models.error import (
    ConfigurationError,
    DomainError,
    ErrorCode,
    FedJobsError,
    SnapshotError,
    UsageError,
)
from fedjobs.models.ledger import (
    ExperimentManifest,
    ReputationView,
    RoundLedger,
    RunSummary,
    ScheduleDecision,
    SelectionResult,
    TrainingOutcome,
    TypeAggregates,
    WhatIfReport,
)

__all__ = [
    "ClientProfile",
    "ConfigurationError",
    "DataRegime",
    "DatasetHolding",
    "DomainError",
    "ErrorCode",
    "ExperimentManifest",
    "FedJobsError",
    "JobSpec",
    "JobState",
    "JsiQueueMode",
    "OracleParams",
    "PopulationGroup",
    "QueueState",
    "ReputationView",
    "RoundLedger",
    "RunSummary",
    "ScheduleDecision",
    "SchedulerKind",
    "SelectionResult",
    "SimConfig",
    "SimulationState",
    "SnapshotError",
    "TieRule",
    "TrainingOutcome",
    "TypeAggregates",
    "UsageError",
    "WhatIfReport",
]
