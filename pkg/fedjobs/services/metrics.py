"""
Run Metrics

Scheduling fairness (SF), convergence-round detection and run / batch
summaries over ledger streams.
"""

import logging
from typing import List, Mapping, Optional, Sequence

import numpy as np
import pandas as pd

from fedjobs.config import get_settings
from fedjobs.models.domain import SchedulerKind
from fedjobs.models.error import UsageError
from fedjobs.models.ledger import RoundLedger, RunSummary

logger = logging.getLogger(__name__)


# ============================================================================
# Scheduling fairness
# ============================================================================

def queue_trajectories(ledgers: Sequence[RoundLedger]) -> np.ndarray:
    """T x M array of Q_m(t) after each round, columns in type order."""
    if not ledgers:
        return np.zeros((0, 0))
    types = sorted(ledgers[0].queues_after)
    return np.array(
        [[ledger.queues_after[m] for m in types] for ledger in ledgers],
        dtype=float,
    )


def scheduling_fairness(trajectories: Sequence[Sequence[float]] | np.ndarray) -> float:
    """
    SF = sqrt( Σ_t Σ_m (Q_m(t) - Q̄(t))² / T ).

    Args:
        trajectories: T rows of per-type queue lengths

    Returns:
        Root of the time-averaged cross-type deviation; 0 means every type
        waited equally at every round
    """
    queues = np.asarray(trajectories, dtype=float)
    if queues.size == 0:
        return 0.0
    deviations = queues - queues.mean(axis=1, keepdims=True)
    return float(np.sqrt(np.sum(deviations ** 2) / queues.shape[0]))


def sf_improvement(sf: float, baseline_sf: float) -> float:
    """Relative SF reduction against a baseline; 0.2 means 20% lower."""
    if baseline_sf == 0:
        return 0.0 if sf == 0 else float("-inf")
    return (baseline_sf - sf) / baseline_sf


# ============================================================================
# Convergence
# ============================================================================

def convergence_round(
    series: Mapping[int, Sequence[float]] | Sequence[Sequence[float]],
    epsilon: float,
    window: int,
) -> Optional[int]:
    """
    First round (1-indexed) after which every job has flattened out.

    Round t qualifies when, for every job, each accuracy in rounds
    t .. t+window-1 lies within ``epsilon`` of that job's maximum over
    rounds 1 .. t. The whole window must lie inside the series.

    Returns:
        The first qualifying round, or None
    """
    rows = list(series.values()) if isinstance(series, Mapping) else list(series)
    if not rows:
        return None
    length = min(len(row) for row in rows)
    if length < window:
        return None

    accuracy = np.array([row[:length] for row in rows], dtype=float)
    running_max = np.maximum.accumulate(accuracy, axis=1)

    for start in range(length - window + 1):
        block = accuracy[:, start:start + window]
        anchor = running_max[:, start:start + 1]
        if np.all(np.abs(block - anchor) <= epsilon):
            return start + 1
    return None


# ============================================================================
# Summaries
# ============================================================================

def summarize(
    ledgers: Sequence[RoundLedger],
    epsilon: Optional[float] = None,
    window: Optional[int] = None,
    scheduler: Optional[SchedulerKind] = None,
    seed: Optional[int] = None,
) -> RunSummary:
    """
    Fold one run's ledgers into a RunSummary.

    Raises:
        UsageError: If ``ledgers`` is empty
    """
    if not ledgers:
        raise UsageError("Cannot summarize an empty ledger list")

    settings = get_settings()
    epsilon = settings.convergence_epsilon if epsilon is None else epsilon
    window = settings.convergence_window if window is None else window

    job_ids = sorted(ledgers[0].accuracies)
    accuracy = {k: [ledger.accuracies[k] for ledger in ledgers] for k in job_ids}

    return RunSummary(
        scheduler=scheduler,
        seed=seed,
        sf=scheduling_fairness(queue_trajectories(ledgers)),
        convergence_round=convergence_round(accuracy, epsilon, window),
        final_accuracy=dict(ledgers[-1].accuracies),
        mean_system_utility=float(np.mean([ledger.system_utility for ledger in ledgers])),
        mean_revenue=float(np.mean([ledger.revenue for ledger in ledgers])),
    )


def summary_frame(summaries: Sequence[RunSummary]) -> pd.DataFrame:
    """summary.csv rows in fixed column order."""
    frame = pd.DataFrame([summary.to_row() for summary in summaries])
    if "convergence_round" in frame:
        frame["convergence_round"] = frame["convergence_round"].astype("Int64")
    return frame


COMPARISON_COLUMNS: List[str] = [
    "scheduler",
    "runs",
    "mean_sf",
    "converged_runs",
    "mean_convergence_round",
    "mean_final_accuracy",
    "mean_system_utility",
    "mean_revenue",
]


def compare_summaries(summaries: Sequence[RunSummary]) -> pd.DataFrame:
    """
    One row per scheduler, in scheduler declaration order.

    Convergence is averaged over converged runs only and left empty when no
    run converged; final accuracy is averaged over jobs and runs.
    """
    if not summaries:
        raise UsageError("Cannot compare an empty set of summaries")

    records = [
        {
            "scheduler": summary.scheduler.value if summary.scheduler else "",
            "sf": summary.sf,
            "convergence_round": summary.convergence_round,
            "final_accuracy": float(np.mean(list(summary.final_accuracy.values()))),
            "system_utility": summary.mean_system_utility,
            "revenue": summary.mean_revenue,
        }
        for summary in summaries
    ]
    frame = pd.DataFrame.from_records(records)
    frame["convergence_round"] = frame["convergence_round"].astype("Float64")

    grouped = frame.groupby("scheduler", sort=False)
    table = pd.DataFrame({
        "runs": grouped.size(),
        "mean_sf": grouped["sf"].mean(),
        "converged_runs": grouped["convergence_round"].count(),
        "mean_convergence_round": grouped["convergence_round"].mean(),
        "mean_final_accuracy": grouped["final_accuracy"].mean(),
        "mean_system_utility": grouped["system_utility"].mean(),
        "mean_revenue": grouped["revenue"].mean(),
    }).reset_index()

    rank = {kind.value: index for index, kind in enumerate(SchedulerKind)}
    table = table.sort_values("scheduler", key=lambda col: col.map(lambda s: rank.get(s, len(rank))))
    return table[COMPARISON_COLUMNS].reset_index(drop=True)
