"""
Job Scheduler

Virtual-queue bookkeeping, the Job Scheduling Index (JSI) ordering used by
FairFedJS, and the four baseline orderings it is compared against.

Orderings:
1. FairFedJS - ascending JSI, Ψ_k = -Q_k - σ p_k/n_k + σ ĉ_m/r̂_m
2. Random    - uniform permutation from the round's schedule substream
3. ALT       - reverse of the previous round's order
4. UB        - ascending previous-round utility (lowest utility first)
5. MJFL      - greedy reputation-sum surrogate of the BODS scheduler, with
               the job's unmet demand as its fairness cost

Every ordering breaks ties by ascending job id.
"""

import logging
import math
from typing import Dict, List, Mapping, Optional, Sequence, Set, Tuple

import numpy as np
from numpy.random import Generator

from fedjobs.models.domain import (
    ClientProfile,
    DataTypeId,
    JobSpec,
    JobState,
    JsiQueueMode,
    QueueState,
    SchedulerKind,
)
from fedjobs.models.error import UsageError
from fedjobs.models.ledger import ScheduleDecision, TypeAggregates
from fedjobs.services.reputation import reputation_score

logger = logging.getLogger(__name__)


# ============================================================================
# Virtual queues
# ============================================================================

def queue_update(queue: float, demand: float, supply: float) -> float:
    """Q(t+1) = max(0, Q(t) + μ(t) - a(t))."""
    return max(0.0, queue + demand - supply)


def update_all_queues(
    queues: QueueState,
    jobs: Sequence[JobSpec],
    supplies: Mapping[int, int],
) -> QueueState:
    """
    Advance every per-type queue and every per-job share by one round.

    Per-type queues use the aggregated demand μ_m = Σ_k n_{k,m} and supply
    a_m = Σ_k a_{k,m}; each job's share uses its own (n_{k,m}, a_{k,m}).
    Σ_k Q_{k,m} >= Q_m, with equality whenever no clamp fired.
    """
    demand_per_type, supply_per_type = type_flows(queues, jobs, supplies)

    per_type = {
        m: queue_update(queues.per_type.get(m, 0.0), demand_per_type[m], supply_per_type[m])
        for m in sorted(demand_per_type)
    }
    per_job = {
        spec.job_id: queue_update(
            queues.per_job.get(spec.job_id, 0.0),
            spec.demand,
            supplies.get(spec.job_id, 0),
        )
        for spec in jobs
    }

    for m, q_m in per_type.items():
        share_sum = sum(per_job[s.job_id] for s in jobs if s.data_type == m)
        if share_sum != q_m:
            logger.debug(f"Type {m}: job shares sum to {share_sum}, type queue is {q_m}")

    return QueueState(per_type=per_type, per_job=per_job)


def type_flows(
    queues: QueueState,
    jobs: Sequence[JobSpec],
    supplies: Mapping[int, int],
) -> Tuple[Dict[DataTypeId, float], Dict[DataTypeId, float]]:
    """Aggregate per-job demand and supply into μ_m(t) and a_m(t)."""
    demand: Dict[DataTypeId, float] = {m: 0.0 for m in queues.per_type}
    supply: Dict[DataTypeId, float] = {m: 0.0 for m in queues.per_type}
    for spec in jobs:
        demand[spec.data_type] = demand.get(spec.data_type, 0.0) + spec.demand
        supply[spec.data_type] = supply.get(spec.data_type, 0.0) + supplies.get(spec.job_id, 0)
    return demand, supply


# ============================================================================
# Lyapunov diagnostics
# ============================================================================

def lyapunov_value(queues: QueueState) -> float:
    """L(Θ) = ½ Σ_m Q_m²."""
    lengths = np.asarray(queues.lengths(), dtype=float)
    return float(0.5 * np.sum(lengths ** 2))


def drift_bound_theta(max_demand: float, max_supply: float) -> float:
    """θ = ½ μ_max² + ½ a_max²."""
    return 0.5 * max_demand ** 2 + 0.5 * max_supply ** 2


def empirical_drift(before: QueueState, after: QueueState) -> float:
    """Realized one-step drift L(t+1) - L(t)."""
    return lyapunov_value(after) - lyapunov_value(before)


def drift_bound(
    before: QueueState,
    demand_per_type: Mapping[DataTypeId, float],
    supply_per_type: Mapping[DataTypeId, float],
) -> float:
    """
    Right-hand side of the drift inequality for one realized round.

    Σ_m [Q_m(t)(μ_m(t) - a_m(t)) + θ_m], with θ_m built from this round's
    μ_m and a_m (the tightest θ the realized trajectory admits).
    """
    total = 0.0
    for m, q_m in before.per_type.items():
        mu = demand_per_type.get(m, 0.0)
        a = supply_per_type.get(m, 0.0)
        total += q_m * (mu - a) + drift_bound_theta(mu, a)
    return total


# ============================================================================
# Job Scheduling Index
# ============================================================================

def jsi(
    queue_share: float,
    payment: float,
    demand: int,
    aggregates: TypeAggregates,
    sigma: float,
) -> float:
    """
    Job Scheduling Index.

    Args:
        queue_share: Q_k(t), the queue the job is charged with
        payment: p_k(t)
        demand: n_k
        aggregates: ĉ_m, r̂_m of the job's data type
        sigma: σ >= 0, weight of the revenue objective

    Returns:
        -Q_k - σ p_k / n_k + σ ĉ_m / r̂_m; lower means served earlier
    """
    return (
        -queue_share
        - sigma * payment / demand
        + sigma * aggregates.avg_cost / aggregates.avg_reliability
    )


def jsi_queue(
    spec: JobSpec,
    queues: QueueState,
    mode: JsiQueueMode,
) -> float:
    """Queue that enters Ψ_k under the configured reading."""
    if mode is JsiQueueMode.PER_TYPE:
        return queues.per_type.get(spec.data_type, 0.0)
    return queues.per_job.get(spec.job_id, 0.0)


def jsi_table(
    specs: Sequence[JobSpec],
    states: Mapping[int, JobState],
    queues: QueueState,
    aggregates: Mapping[DataTypeId, TypeAggregates],
    sigma: float,
    mode: JsiQueueMode = JsiQueueMode.PER_JOB,
) -> Dict[int, float]:
    """Ψ_k(t) for every job."""
    return {
        spec.job_id: jsi(
            jsi_queue(spec, queues, mode),
            states[spec.job_id].payment,
            spec.demand,
            aggregates[spec.data_type],
            sigma,
        )
        for spec in specs
    }


def order_fairfedjs(
    specs: Sequence[JobSpec],
    states: Mapping[int, JobState],
    queues: QueueState,
    aggregates: Mapping[DataTypeId, TypeAggregates],
    sigma: float,
    mode: JsiQueueMode = JsiQueueMode.PER_JOB,
) -> ScheduleDecision:
    """Sort jobs by ascending Ψ_k, ties by ascending job id."""
    values = jsi_table(specs, states, queues, aggregates, sigma, mode)
    return order_by_jsi(values)


def order_by_jsi(values: Mapping[int, float]) -> ScheduleDecision:
    ordered = sorted(values, key=lambda job_id: (values[job_id], job_id))
    return ScheduleDecision(ordered_jobs=tuple(ordered), jsi=dict(values))


# ============================================================================
# Baselines
# ============================================================================

def _id_order(specs: Sequence[JobSpec]) -> List[int]:
    return sorted(spec.job_id for spec in specs)


def _order_random(specs: Sequence[JobSpec], rng: Generator) -> List[int]:
    ids = _id_order(specs)
    return [ids[i] for i in rng.permutation(len(ids))]


def _order_alternating(specs: Sequence[JobSpec], prev_order: Sequence[int]) -> List[int]:
    ids = _id_order(specs)
    if not prev_order:
        return ids
    reversed_prev = [job_id for job_id in reversed(prev_order) if job_id in ids]
    # jobs missing from the previous order go last, by id
    return reversed_prev + [job_id for job_id in ids if job_id not in reversed_prev]


def _order_utility(specs: Sequence[JobSpec], states: Mapping[int, JobState]) -> List[int]:
    ids = _id_order(specs)
    if any(states[job_id].utility is None for job_id in ids):
        return ids
    return sorted(ids, key=lambda job_id: (states[job_id].utility, job_id))


def mjfl_score(
    reputations: Sequence[float],
    queue_share: float,
    fairness_weight: float,
) -> float:
    """Top-n reputation sum plus the weighted unmet demand the job carries."""
    return float(sum(reputations)) + fairness_weight * queue_share


def _order_mjfl(
    specs: Sequence[JobSpec],
    clients: Sequence[ClientProfile],
    queues: QueueState,
    fairness_weight: float,
) -> List[int]:
    """
    Greedy reputation-cost surrogate of the BODS scheduler.

    Repeatedly serve the job with the largest ``mjfl_score``: the sum of its
    top-n_k reputations among still-unreserved clients plus its weighted
    per-job queue share, then reserve those clients. Clients holding several
    types compete for every type until reserved. A zero weight leaves the
    pure reputation-sum greedy.
    """
    ranked: Dict[DataTypeId, List[Tuple[float, int]]] = {}
    for spec in specs:
        if spec.data_type in ranked:
            continue
        pool = [
            (reputation_score(c.holding(spec.data_type).rep_success,
                              c.holding(spec.data_type).rep_failure), c.client_id)
            for c in clients
            if c.holds(spec.data_type)
        ]
        ranked[spec.data_type] = sorted(pool, key=lambda item: (-item[0], item[1]))

    reserved: Set[int] = set()
    remaining = _id_order(specs)
    by_id = {spec.job_id: spec for spec in specs}
    order: List[int] = []

    while remaining:
        best_job: Optional[int] = None
        best_score = -math.inf
        best_pick: List[int] = []
        for job_id in remaining:
            spec = by_id[job_id]
            free = [item for item in ranked[spec.data_type] if item[1] not in reserved]
            pick = free[: spec.demand]
            score = mjfl_score(
                [item[0] for item in pick],
                queues.per_job.get(job_id, 0.0),
                fairness_weight,
            )
            # strict: equal scores keep the lower id
            if score > best_score:
                best_job, best_score, best_pick = job_id, score, [item[1] for item in pick]
        assert best_job is not None
        order.append(best_job)
        reserved.update(best_pick)
        remaining.remove(best_job)

    return order


def order_baseline(
    kind: SchedulerKind,
    specs: Sequence[JobSpec],
    states: Mapping[int, JobState],
    prev_order: Sequence[int],
    clients: Sequence[ClientProfile],
    rng: Generator,
    queues: Optional[QueueState] = None,
    mjfl_fairness_weight: float = 1.0,
) -> ScheduleDecision:
    """
    Job order under one of the baseline policies.

    ``queues`` and ``mjfl_fairness_weight`` only matter to MJFL; without
    queues every share counts as zero.

    Raises:
        UsageError: If ``kind`` is not a baseline
    """
    if kind is SchedulerKind.RANDOM:
        ordered = _order_random(specs, rng)
    elif kind is SchedulerKind.ALT:
        ordered = _order_alternating(specs, prev_order)
    elif kind is SchedulerKind.UB:
        ordered = _order_utility(specs, states)
    elif kind is SchedulerKind.MJFL:
        ordered = _order_mjfl(
            specs, clients, queues or QueueState(per_type={}), mjfl_fairness_weight
        )
    else:
        raise UsageError(f"Not a baseline scheduler: {kind}", scheduler=kind)
    return ScheduleDecision(ordered_jobs=tuple(ordered))


def order_jobs(
    kind: SchedulerKind | str,
    specs: Sequence[JobSpec],
    states: Mapping[int, JobState],
    queues: QueueState,
    aggregates: Mapping[DataTypeId, TypeAggregates],
    sigma: float,
    mode: JsiQueueMode,
    prev_order: Sequence[int],
    clients: Sequence[ClientProfile],
    rng: Generator,
    mjfl_fairness_weight: float = 1.0,
) -> ScheduleDecision:
    """
    Dispatch to FairFedJS or a baseline.

    Raises:
        UsageError: If ``kind`` names no known scheduler
    """
    try:
        kind = SchedulerKind(kind)
    except ValueError:
        raise UsageError(f"Unknown scheduler: {kind}", scheduler=kind) from None

    if kind is SchedulerKind.FAIRFEDJS:
        return order_fairfedjs(specs, states, queues, aggregates, sigma, mode)
    return order_baseline(
        kind, specs, states, prev_order, clients, rng, queues, mjfl_fairness_weight
    )
