"""
Round and Run Records

Pydantic models for what the simulator emits: per-round ledgers, the
intermediate scheduling / selection / training results, run summaries and
the experiment manifest consumed by the CLI.
"""

from pathlib import Path
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from fedjobs.models.domain import DataTypeId, FrozenModel, SchedulerKind


# -----------------------------------------------------------------------------
# Intermediate results
# -----------------------------------------------------------------------------

class ReputationView(FrozenModel):
    """BRS reputation of one (client, data type) pair."""

    score: float = Field(..., gt=0.0, lt=1.0)


class TypeAggregates(FrozenModel):
    """Average cost and reliability over the clients holding one data type."""

    data_type: DataTypeId
    avg_cost: float = Field(..., gt=0.0, description="ĉ_m(t)")
    avg_reliability: float = Field(..., gt=0.0, lt=1.0, description="r̂_m(t)")

    @property
    def cost_per_reliability(self) -> float:
        return self.avg_cost / self.avg_reliability


class ScheduleDecision(FrozenModel):
    """Job order for one round; ``jsi`` is filled only by FairFedJS."""

    ordered_jobs: Tuple[int, ...]
    jsi: Dict[int, float] = Field(default_factory=dict)


class SelectionResult(FrozenModel):
    """Clients chosen for one job, in choice order, with the γ scores seen."""

    job_id: int
    chosen: Tuple[int, ...]
    gamma: Dict[int, float] = Field(default_factory=dict)

    @property
    def supply(self) -> int:
        return len(self.chosen)


class TrainingOutcome(FrozenModel):
    """What one round of (synthetic) training did to a job."""

    new_accuracy: float
    per_client_improved: Dict[int, bool] = Field(default_factory=dict)


# -----------------------------------------------------------------------------
# Ledger
# -----------------------------------------------------------------------------

class RoundLedger(FrozenModel):
    """Immutable record of one scheduling round."""

    round: int
    schedule: Tuple[int, ...]
    jsi_values: Dict[int, float] = Field(default_factory=dict)
    assignments: Dict[int, Tuple[int, ...]]
    supply: Dict[int, int]
    payments: Dict[int, float]
    utilities: Dict[int, float]
    costs: Dict[int, float]
    revenue: float
    system_utility: float
    queues_after: Dict[DataTypeId, float]
    queue_shares_after: Dict[int, float]
    demand_per_type: Dict[DataTypeId, float]
    supply_per_type: Dict[DataTypeId, float]
    accuracies: Dict[int, float]


# -----------------------------------------------------------------------------
# Summaries
# -----------------------------------------------------------------------------

class RunSummary(FrozenModel):
    """Aggregate view of one run (one scheduler, one seed)."""

    scheduler: Optional[SchedulerKind] = None
    seed: Optional[int] = None
    sf: float = Field(..., ge=0.0)
    convergence_round: Optional[int] = None
    final_accuracy: Dict[int, float]
    mean_system_utility: float
    mean_revenue: float

    def to_row(self) -> Dict[str, object]:
        """Flat row in summary.csv column order."""
        row: Dict[str, object] = {
            "scheduler": self.scheduler.value if self.scheduler else "",
            "seed": self.seed,
            "sf": self.sf,
            "convergence_round": self.convergence_round,
        }
        for job_id in sorted(self.final_accuracy):
            row[f"final_acc_job{job_id}"] = self.final_accuracy[job_id]
        row["mean_system_utility"] = self.mean_system_utility
        row["mean_revenue"] = self.mean_revenue
        return row


class ExperimentManifest(BaseModel):
    """What to run: one config, a set of seeds, a set of schedulers, where to write."""

    model_config = ConfigDict(extra="forbid")

    config_path: Path
    output_dir: Path
    seeds: List[int]
    schedulers: List[SchedulerKind]
    workers: int = Field(default=1, ge=1)

    @field_validator("seeds")
    @classmethod
    def validate_seeds(cls, v: List[int]) -> List[int]:
        """At least one seed, each a 64-bit unsigned integer."""
        if not v:
            raise ValueError("at least one seed is required")
        for seed in v:
            if not 0 <= seed < 2 ** 64:
                raise ValueError(f"seed out of 64-bit range: {seed}")
        return v

    @field_validator("schedulers")
    @classmethod
    def validate_schedulers(cls, v: List[SchedulerKind]) -> List[SchedulerKind]:
        if not v:
            raise ValueError("at least one scheduler is required")
        return v


class WhatIfReport(FrozenModel):
    """Effect of one hypothetical payment on the JSI ordering of a snapshot."""

    job_id: int
    payment: float
    hypothetical_payment: float
    jsi_current: Dict[int, float]
    jsi_hypothetical: Dict[int, float]
    order_current: Tuple[int, ...]
    order_hypothetical: Tuple[int, ...]

    @property
    def rank_current(self) -> int:
        """1-based position of the job in the current order."""
        return self.order_current.index(self.job_id) + 1

    @property
    def rank_hypothetical(self) -> int:
        return self.order_hypothetical.index(self.job_id) + 1

    @property
    def jsi_change(self) -> float:
        return self.jsi_hypothetical[self.job_id] - self.jsi_current[self.job_id]
