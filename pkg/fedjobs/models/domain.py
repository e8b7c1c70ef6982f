"""
Domain Models

Pydantic models for clients, jobs, queues and the experiment configuration.
All models are frozen: successor states are produced with ``model_copy``
inside the simulator, never by mutating a shared instance.

Usage:
    from fedjobs.models.domain import SimConfig, JobSpec

    config = SimConfig.model_validate(document)
    job = config.job(0)
"""

from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from fedjobs.config import get_settings

# Data type index m in [0, M)
DataTypeId = int


# -----------------------------------------------------------------------------
# Enums
# -----------------------------------------------------------------------------

class SchedulerKind(str, Enum):
    """Job ordering policies."""

    FAIRFEDJS = "FairFedJS"
    RANDOM = "Random"
    ALT = "ALT"
    UB = "UB"
    MJFL = "MJFL"


class DataRegime(str, Enum):
    """How client data quality is distributed."""

    IID = "IID"
    NON_IID = "NonIID"


class JsiQueueMode(str, Enum):
    """Which queue enters the scheduling index: the job's own share or its type queue."""

    PER_JOB = "per_job"
    PER_TYPE = "per_type"


class TieRule(str, Enum):
    """What the derivative-follower does when the sign product is zero."""

    FREEZE = "freeze"
    CONTINUE = "continue"


class FrozenModel(BaseModel):
    """Immutable value type; unknown keys are rejected."""

    model_config = ConfigDict(frozen=True, extra="forbid")


# -----------------------------------------------------------------------------
# Clients
# -----------------------------------------------------------------------------

class DatasetHolding(FrozenModel):
    """One dataset of one client, with its cost, latent quality and track record."""

    cost: float = Field(..., gt=0.0, description="c_{i,m}: payment units per round of participation")
    quality: float = Field(
        ...,
        ge=0.0,
        le=1.0,
        description="Simulator-only latent chance that an update from this dataset helps"
    )
    rep_success: int = Field(default=0, ge=0, description="a_{i,m}")
    rep_failure: int = Field(default=0, ge=0, description="b_{i,m}")
    selection_counts: Dict[int, int] = Field(
        default_factory=dict,
        description="s_{i,k,m} keyed by job id; missing jobs count as 0"
    )

    def selections_for(self, job_id: int) -> int:
        """Return s_{i,k,m} for one job."""
        return self.selection_counts.get(job_id, 0)


class ClientProfile(FrozenModel):
    """An FL client and the datasets it holds."""

    client_id: int = Field(..., ge=0)
    datasets: Dict[DataTypeId, DatasetHolding]

    def holds(self, data_type: DataTypeId) -> bool:
        return data_type in self.datasets

    def holding(self, data_type: DataTypeId) -> DatasetHolding:
        return self.datasets[data_type]

    def with_holding(self, data_type: DataTypeId, holding: DatasetHolding) -> "ClientProfile":
        """Return a copy with one holding replaced."""
        datasets = dict(self.datasets)
        datasets[data_type] = holding
        return self.model_copy(update={"datasets": datasets})


class PopulationGroup(FrozenModel):
    """A block of ``count`` clients that all hold exactly ``types``."""

    types: List[DataTypeId]
    count: int


# -----------------------------------------------------------------------------
# Jobs
# -----------------------------------------------------------------------------

class JobSpec(FrozenModel):
    """A published FL job: one data type, a per-round demand and an opening bid."""

    job_id: int
    data_type: DataTypeId
    demand: int = Field(..., description="n_{k,m}: clients requested per round")
    initial_payment: float = Field(..., description="p_k(0)")
    name: Optional[str] = Field(default=None, description="Free-form label, e.g. the model family")


class JobState(FrozenModel):
    """Per-job state carried between rounds."""

    job_id: int
    payment: float = Field(..., description="p_k(t)")
    payment_prev: Optional[float] = Field(default=None, description="p_k(t-1)")
    utility: Optional[float] = Field(default=None, description="u_k(t); None before the first round")
    utility_prev: Optional[float] = Field(default=None, description="u_k(t-1)")
    accuracy: float = Field(default=0.0, description="Oracle accuracy proxy of the global model")
    queue_share: float = Field(default=0.0, ge=0.0, description="Q_{k,m}(t)")
    price_direction: int = Field(
        default=1,
        description="Sign of the last nonzero payment move; +1 before any move"
    )


class QueueState(FrozenModel):
    """Per-type virtual queues Q_m and per-job shares Q_{k,m}."""

    per_type: Dict[DataTypeId, float]
    per_job: Dict[int, float] = Field(default_factory=dict)

    @classmethod
    def empty(cls, num_types: int, job_ids: List[int]) -> "QueueState":
        return cls(
            per_type={m: 0.0 for m in range(num_types)},
            per_job={k: 0.0 for k in job_ids},
        )

    def lengths(self) -> List[float]:
        """Per-type queue lengths ordered by type id."""
        return [self.per_type[m] for m in sorted(self.per_type)]


# -----------------------------------------------------------------------------
# Oracle
# -----------------------------------------------------------------------------

class OracleParams(FrozenModel):
    """Parameters of the synthetic training oracle."""

    acc_cap: float = Field(default=0.9, description="Asymptotic accuracy A_cap")
    gain_rate: float = Field(default=0.1, description="g: fraction of the remaining gap closed per round")
    noise_std: float = Field(default=0.0, description="Std-dev of additive accuracy jitter")
    noniid_penalty: float = Field(
        default=0.2,
        description="Fractional reduction of client quality under the NonIID regime"
    )
    initial_accuracy: float = Field(default=0.1, description="Accuracy before round 0")


# -----------------------------------------------------------------------------
# Experiment configuration
# -----------------------------------------------------------------------------

DEFAULT_QUALITY_RANGES: Dict[DataRegime, Tuple[float, float]] = {
    DataRegime.IID: (0.7, 1.0),
    DataRegime.NON_IID: (0.4, 1.0),
}


class SimConfig(FrozenModel):
    """
    Full description of one experiment.

    Structural problems (wrong types, unknown keys) are rejected by pydantic
    when the document is parsed. Range invariants are deliberately left to
    ``validate_config`` so that every violation can be reported at once.
    """

    num_clients: int
    num_types: int
    jobs: List[JobSpec]
    rounds: int
    sigma: float = 1.0
    beta: float = 0.5
    delta: float = 2.0
    p_min: float = 2.0
    p_max: float = 100.0
    scheduler: SchedulerKind = SchedulerKind.FAIRFEDJS
    oracle: OracleParams = Field(default_factory=OracleParams)
    oracle_overrides: Dict[int, OracleParams] = Field(
        default_factory=dict,
        description="Per-job oracle parameters keyed by job id"
    )
    data_regime: DataRegime = DataRegime.IID
    seed: int = 0

    population: Optional[List[PopulationGroup]] = Field(
        default=None,
        description="Client blocks; None means client i holds type i mod M"
    )
    cost_range: Tuple[float, float] = (1.0, 3.0)
    quality_ranges: Dict[DataRegime, Tuple[float, float]] = Field(
        default_factory=lambda: dict(DEFAULT_QUALITY_RANGES)
    )
    jsi_queue_mode: JsiQueueMode = JsiQueueMode.PER_JOB
    df_tie_rule: TieRule = TieRule.FREEZE
    mjfl_fairness_weight: float = Field(
        default=1.0,
        description="Weight of a job's unmet demand in the MJFL score; 0 ranks by reputation only"
    )
    convergence_epsilon: float = Field(default_factory=lambda: get_settings().convergence_epsilon)
    convergence_window: int = Field(default_factory=lambda: get_settings().convergence_window)

    def job(self, job_id: int) -> JobSpec:
        for spec in self.jobs:
            if spec.job_id == job_id:
                return spec
        raise KeyError(job_id)

    def job_ids(self) -> List[int]:
        return [spec.job_id for spec in self.jobs]

    def oracle_for(self, job_id: int) -> OracleParams:
        return self.oracle_overrides.get(job_id, self.oracle)

    def quality_range(self) -> Tuple[float, float]:
        return self.quality_ranges.get(self.data_regime, DEFAULT_QUALITY_RANGES[self.data_regime])

    def with_run(self, scheduler: SchedulerKind, seed: int) -> "SimConfig":
        """Copy of this config for one (scheduler, seed) cell."""
        return self.model_copy(update={"scheduler": scheduler, "seed": seed})


class SimulationState(FrozenModel):
    """Everything ``run_round`` folds over; also the what-if snapshot format."""

    round: int = 0
    clients: Tuple[ClientProfile, ...]
    jobs: Tuple[JobState, ...]
    queues: QueueState
    prev_order: Tuple[int, ...] = ()
    sigma: float = 1.0
    specs: Tuple[JobSpec, ...] = ()
    jsi_queue_mode: JsiQueueMode = JsiQueueMode.PER_JOB

    def job_state(self, job_id: int) -> JobState:
        for state in self.jobs:
            if state.job_id == job_id:
                return state
        raise KeyError(job_id)

    def spec(self, job_id: int) -> JobSpec:
        for spec in self.specs:
            if spec.job_id == job_id:
                return spec
        raise KeyError(job_id)
