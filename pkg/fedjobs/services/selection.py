"""
Client Selection

Per-job selection by γ_{i,k,m} = r_{i,m} - β F_{i,k,m}, consuming a shared
availability set so that no client serves two jobs in one round.
"""

import logging
from typing import AbstractSet, Dict, Sequence, Set, Tuple

from fedjobs.models.domain import ClientProfile, JobSpec
from fedjobs.models.ledger import SelectionResult
from fedjobs.services.reputation import fairness_table, reputation_score

logger = logging.getLogger(__name__)


def selection_score(reputation: float, fairness: float, beta: float) -> float:
    """γ = r - β F; under-selected clients (F < 0) are boosted."""
    return reputation - beta * fairness


def select_for_job(
    spec: JobSpec,
    clients: Sequence[ClientProfile],
    available: AbstractSet[int],
    beta: float,
) -> SelectionResult:
    """
    Choose up to n_k clients for one job.

    Reputation and fairness come from ``clients`` as they stood at the start
    of the round; fairness is centred over every holder of the job's type,
    assigned or not.

    Args:
        spec: Job being served
        clients: Start-of-round client snapshot
        available: Ids of clients not yet assigned this round
        beta: Fairness weight β >= 0

    Returns:
        The min(n_k, |available holders|) highest-γ clients, ties by
        ascending client id
    """
    m = spec.data_type
    holders = [c for c in clients if c.holds(m)]
    if not holders:
        logger.warning(f"Job {spec.job_id}: no clients hold data type {m}")
        return SelectionResult(job_id=spec.job_id, chosen=())

    fairness = fairness_table(list(clients), spec.job_id, m)
    gamma: Dict[int, float] = {}
    for client in holders:
        if client.client_id not in available:
            continue
        holding = client.holding(m)
        gamma[client.client_id] = selection_score(
            reputation_score(holding.rep_success, holding.rep_failure),
            fairness[client.client_id],
            beta,
        )

    ranked = sorted(gamma, key=lambda client_id: (-gamma[client_id], client_id))
    chosen = tuple(ranked[: spec.demand])
    return SelectionResult(job_id=spec.job_id, chosen=chosen, gamma=gamma)


def select_in_order(
    order: Sequence[int],
    specs: Sequence[JobSpec],
    clients: Sequence[ClientProfile],
    beta: float,
) -> Tuple[Dict[int, SelectionResult], Set[int]]:
    """
    Serve jobs one after another in schedule order.

    Returns:
        Selection per job id and the ids left unassigned
    """
    by_id = {spec.job_id: spec for spec in specs}
    available: Set[int] = {c.client_id for c in clients}
    results: Dict[int, SelectionResult] = {}

    for job_id in order:
        result = select_for_job(by_id[job_id], clients, available, beta)
        available.difference_update(result.chosen)
        results[job_id] = result

    return results, available
