"""
Round Simulator

Runs the multi-job scheduling loop for T rounds. Each round:

1. Derivative-follower payment update (skipped until two utilities exist)
2. Per-type cost / reliability aggregates from the start-of-round clients
3. Job ordering (FairFedJS or a baseline)
4. Sequential client selection in schedule order
5. Oracle training per job
6. Reputation and selection-count updates
7. Virtual-queue update
8. Ledger emission

Randomness comes only from named substreams of the config seed, so the
oracle draws for (round, job) are the same under every scheduler.
"""

import logging
from typing import Dict, List, Optional, Tuple

from fedjobs.models.domain import (
    ClientProfile,
    JobState,
    JsiQueueMode,
    QueueState,
    SchedulerKind,
    SimConfig,
    SimulationState,
)
from fedjobs.models.error import ConfigurationError, UsageError
from fedjobs.models.ledger import RoundLedger, TypeAggregates, WhatIfReport
from fedjobs.services.economics import (
    df_price_update,
    job_cost,
    job_utility,
    price_direction,
    system_revenue,
    system_utility,
    type_aggregates,
)
from fedjobs.services.oracle import SyntheticOracle, TrainingOracle
from fedjobs.services.population import build_population, validate_config
from fedjobs.services.reputation import record_selection, update_reputation
from fedjobs.services.scheduler import (
    drift_bound,
    empirical_drift,
    jsi_table,
    order_by_jsi,
    order_jobs,
    type_flows,
    update_all_queues,
)
from fedjobs.services.selection import select_in_order
from fedjobs.utils.rng import Stream, substream

logger = logging.getLogger(__name__)


# ============================================================================
# Setup
# ============================================================================

def initial_state(config: SimConfig) -> SimulationState:
    """Seeded population, opening bids and empty queues."""
    clients = build_population(config, substream(config.seed, Stream.POPULATION))
    jobs = tuple(
        JobState(
            job_id=spec.job_id,
            payment=spec.initial_payment,
            accuracy=config.oracle_for(spec.job_id).initial_accuracy,
        )
        for spec in config.jobs
    )
    return SimulationState(
        round=0,
        clients=tuple(clients),
        jobs=jobs,
        queues=QueueState.empty(config.num_types, config.job_ids()),
        sigma=config.sigma,
        specs=tuple(config.jobs),
        jsi_queue_mode=config.jsi_queue_mode,
    )


# ============================================================================
# One round
# ============================================================================

def _update_payment(job: JobState, config: SimConfig) -> JobState:
    if job.utility is None or job.utility_prev is None or job.payment_prev is None:
        new_payment = job.payment
    else:
        new_payment = df_price_update(
            job.payment,
            job.payment_prev,
            job.utility,
            job.utility_prev,
            step=config.delta,
            p_min=config.p_min,
            p_max=config.p_max,
            tie_rule=config.df_tie_rule,
            last_direction=job.price_direction,
        )
    return job.model_copy(update={
        "payment": new_payment,
        "payment_prev": job.payment,
        "price_direction": price_direction(new_payment, job.payment, job.price_direction),
    })


def current_aggregates(state: SimulationState) -> Dict[int, TypeAggregates]:
    """ĉ_m, r̂_m for every data type some job asks for."""
    types = sorted({spec.data_type for spec in state.specs})
    return {m: type_aggregates(state.clients, m) for m in types}


def run_round(
    state: SimulationState,
    config: SimConfig,
    scheduler: Optional[SchedulerKind] = None,
    oracle: Optional[TrainingOracle] = None,
) -> Tuple[SimulationState, RoundLedger]:
    """
    Advance the simulation by one round.

    Args:
        state: State at the start of round t
        config: Experiment parameters
        scheduler: Ordering policy; defaults to ``config.scheduler``
        oracle: Training oracle; defaults to the synthetic one

    Returns:
        (state at t+1, ledger of round t)

    Raises:
        UsageError: Unknown scheduler
        DomainError: A job's data type has no holders
    """
    t = state.round
    kind = scheduler or config.scheduler
    oracle = oracle or SyntheticOracle()
    specs = state.specs

    # 1. payments
    jobs: Dict[int, JobState] = {job.job_id: _update_payment(job, config) for job in state.jobs}

    # 2. aggregates
    aggregates = current_aggregates(state)

    # 3. ordering
    decision = order_jobs(
        kind,
        specs,
        jobs,
        state.queues,
        aggregates,
        state.sigma,
        state.jsi_queue_mode,
        state.prev_order,
        state.clients,
        substream(config.seed, Stream.SCHEDULE, t),
        mjfl_fairness_weight=config.mjfl_fairness_weight,
    )

    # 4. selection
    selections, _ = select_in_order(decision.ordered_jobs, specs, state.clients, config.beta)
    supplies = {spec.job_id: selections[spec.job_id].supply for spec in specs}

    # 5-6. training, then reputation and selection counts
    clients: Dict[int, ClientProfile] = {c.client_id: c for c in state.clients}
    accuracies: Dict[int, float] = {}
    for spec in sorted(specs, key=lambda s: s.job_id):
        chosen = selections[spec.job_id].chosen
        m = spec.data_type
        qualities = {i: clients[i].holding(m).quality for i in chosen}
        outcome = oracle.train(
            jobs[spec.job_id].accuracy,
            qualities,
            config.oracle_for(spec.job_id),
            config.data_regime,
            substream(config.seed, Stream.ORACLE, t, spec.job_id),
        )
        accuracies[spec.job_id] = outcome.new_accuracy
        for client_id in chosen:
            holding = update_reputation(
                clients[client_id].holding(m),
                outcome.per_client_improved[client_id],
            )
            holding = record_selection(holding, spec.job_id)
            clients[client_id] = clients[client_id].with_holding(m, holding)

    # economics at the start-of-round aggregates
    payments = {spec.job_id: jobs[spec.job_id].payment for spec in specs}
    costs = {
        spec.job_id: job_cost(aggregates[spec.data_type], supplies[spec.job_id])
        for spec in specs
    }
    utilities = {
        spec.job_id: job_utility(
            supplies[spec.job_id], spec.demand, payments[spec.job_id], costs[spec.job_id]
        )
        for spec in specs
    }

    # 7. queues
    queues = update_all_queues(state.queues, specs, supplies)
    demand_per_type, supply_per_type = type_flows(state.queues, specs, supplies)
    if logger.isEnabledFor(logging.DEBUG):
        drift = empirical_drift(state.queues, queues)
        bound = drift_bound(state.queues, demand_per_type, supply_per_type)
        logger.debug(
            f"Round {t}: order={list(decision.ordered_jobs)} supply={supplies} "
            f"queues={queues.per_type} drift={drift:.3f} bound={bound:.3f}"
        )

    next_jobs = tuple(
        jobs[spec.job_id].model_copy(update={
            "utility": utilities[spec.job_id],
            "utility_prev": jobs[spec.job_id].utility,
            "accuracy": accuracies[spec.job_id],
            "queue_share": queues.per_job[spec.job_id],
        })
        for spec in specs
    )

    # 8. ledger
    ledger = RoundLedger(
        round=t,
        schedule=decision.ordered_jobs,
        jsi_values=decision.jsi,
        assignments={spec.job_id: selections[spec.job_id].chosen for spec in specs},
        supply=supplies,
        payments=payments,
        utilities=utilities,
        costs=costs,
        revenue=system_revenue(
            [supplies[s.job_id] for s in specs],
            [s.demand for s in specs],
            [payments[s.job_id] for s in specs],
        ),
        system_utility=system_utility(
            [supplies[s.job_id] for s in specs],
            [s.demand for s in specs],
            [payments[s.job_id] for s in specs],
            [costs[s.job_id] for s in specs],
        ),
        queues_after=dict(queues.per_type),
        queue_shares_after=dict(queues.per_job),
        demand_per_type=demand_per_type,
        supply_per_type=supply_per_type,
        accuracies=accuracies,
    )

    next_state = state.model_copy(update={
        "round": t + 1,
        "clients": tuple(clients[c.client_id] for c in state.clients),
        "jobs": next_jobs,
        "queues": queues,
        "prev_order": decision.ordered_jobs,
    })
    return next_state, ledger


# ============================================================================
# Full runs
# ============================================================================

def simulate(
    config: SimConfig,
    oracle: Optional[TrainingOracle] = None,
) -> Tuple[List[RoundLedger], SimulationState]:
    """
    Run all T rounds and keep the final state as well as the ledgers.

    Raises:
        ConfigurationError: If ``validate_config`` reports any violation
    """
    problems = validate_config(config)
    if problems:
        raise ConfigurationError("Invalid configuration", details=problems)

    if (config.jsi_queue_mode is JsiQueueMode.PER_TYPE
            and config.scheduler is not SchedulerKind.FAIRFEDJS):
        logger.debug(f"jsi_queue_mode=per_type has no effect on scheduler {config.scheduler.value}")

    state = initial_state(config)
    ledgers: List[RoundLedger] = []
    for _ in range(config.rounds):
        state, ledger = run_round(state, config, oracle=oracle)
        ledgers.append(ledger)
    return ledgers, state


def run_simulation(
    config: SimConfig,
    oracle: Optional[TrainingOracle] = None,
) -> List[RoundLedger]:
    """T ledgers for one config; the config is never modified."""
    ledgers, _ = simulate(config, oracle)
    return ledgers


# ============================================================================
# What-if
# ============================================================================

def payment_whatif(state: SimulationState, job_id: int, payment: float) -> WhatIfReport:
    """
    Re-rank the jobs of a snapshot as if ``job_id`` bid ``payment``.

    Aggregates are recomputed from the snapshot's clients; the snapshot's σ
    and JSI queue reading are used. Nothing is modified.

    Raises:
        UsageError: If the snapshot has no job ``job_id``
    """
    jobs = {job.job_id: job for job in state.jobs}
    if job_id not in jobs:
        raise UsageError(f"Unknown job id: {job_id}", job_id=job_id)

    aggregates = current_aggregates(state)
    current = jsi_table(state.specs, jobs, state.queues, aggregates, state.sigma, state.jsi_queue_mode)

    hypothetical_jobs = dict(jobs)
    hypothetical_jobs[job_id] = jobs[job_id].model_copy(update={"payment": payment})
    hypothetical = jsi_table(
        state.specs, hypothetical_jobs, state.queues, aggregates, state.sigma, state.jsi_queue_mode
    )

    return WhatIfReport(
        job_id=job_id,
        payment=jobs[job_id].payment,
        hypothetical_payment=payment,
        jsi_current=current,
        jsi_hypothetical=hypothetical,
        order_current=order_by_jsi(current).ordered_jobs,
        order_hypothetical=order_by_jsi(hypothetical).ordered_jobs,
    )
