"""
Reputation and Data Fairness

Beta Reputation System scores per (client, data type) and mean-centred
data-fairness scores per (client, job, data type).

Usage:
    from fedjobs.services.reputation import reputation_score, data_fairness

    r = reputation_score(3, 1)          # 4/6
    f = data_fairness(0, job_id=2, data_type=1, counts={0: 4, 1: 2, 2: 0})
"""

import logging
from typing import Dict, List, Mapping

from fedjobs.models.domain import ClientProfile, DatasetHolding, DataTypeId
from fedjobs.models.error import DomainError
from fedjobs.models.ledger import ReputationView

logger = logging.getLogger(__name__)


# ============================================================================
# Beta Reputation System
# ============================================================================

def reputation_score(successes: int, failures: int) -> float:
    """
    Expected value of Beta(a + 1, b + 1).

    Args:
        successes: a_{i,m}, rounds in which the client's update improved accuracy
        failures: b_{i,m}, rounds in which it did not

    Returns:
        (a + 1) / (a + b + 2), always in the open interval (0, 1)
    """
    return (successes + 1) / (successes + failures + 2)


def reputation_view(holding: DatasetHolding) -> ReputationView:
    return ReputationView(score=reputation_score(holding.rep_success, holding.rep_failure))


def update_reputation(holding: DatasetHolding, improved: bool) -> DatasetHolding:
    """Count one more success (improved) or failure (not improved)."""
    if improved:
        return holding.model_copy(update={"rep_success": holding.rep_success + 1})
    return holding.model_copy(update={"rep_failure": holding.rep_failure + 1})


# ============================================================================
# Data Fairness
# ============================================================================

def data_fairness(
    client_id: int,
    job_id: int,
    data_type: DataTypeId,
    counts: Mapping[int, int],
) -> float:
    """
    Selection count of one client minus the mean over all holders of the type.

    Args:
        client_id: Client being scored
        job_id: Job the counts refer to (kept for the error message; counts are per job)
        data_type: Data type m the counts refer to
        counts: s_{i,k,m} for every client i in N_m

    Returns:
        s_{i,k,m} - mean_{i' in N_m} s_{i',k,m}; negative means under-selected

    Raises:
        DomainError: If N_m is empty
    """
    if not counts:
        raise DomainError(
            f"No clients hold data type {data_type}",
            job_id=job_id,
            data_type=data_type,
        )
    mean = sum(counts.values()) / len(counts)
    return counts.get(client_id, 0) - mean


def selection_counts(
    clients: List[ClientProfile],
    job_id: int,
    data_type: DataTypeId,
) -> Dict[int, int]:
    """Collect s_{i,k,m} for every client holding ``data_type``."""
    return {
        client.client_id: client.holding(data_type).selections_for(job_id)
        for client in clients
        if client.holds(data_type)
    }


def fairness_table(
    clients: List[ClientProfile],
    job_id: int,
    data_type: DataTypeId,
) -> Dict[int, float]:
    """
    F_{i,k,m} for every holder of ``data_type``, from one consistent snapshot.

    Raises:
        DomainError: If no client holds ``data_type``
    """
    counts = selection_counts(clients, job_id, data_type)
    if not counts:
        raise DomainError(
            f"No clients hold data type {data_type}",
            job_id=job_id,
            data_type=data_type,
        )
    return {
        client_id: data_fairness(client_id, job_id, data_type, counts)
        for client_id in counts
    }


def record_selection(holding: DatasetHolding, job_id: int) -> DatasetHolding:
    """Increment s_{i,k,m} for one job, leaving other jobs' counters alone."""
    counts = dict(holding.selection_counts)
    counts[job_id] = counts.get(job_id, 0) + 1
    return holding.model_copy(update={"selection_counts": counts})
