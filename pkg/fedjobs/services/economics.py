"""
Economics Service

Cost, revenue and utility accounting for the FL system and the
derivative-follower payment update each job applies to its bid.
"""

import logging
from typing import List, Optional, Sequence

import numpy as np

from fedjobs.models.domain import ClientProfile, DataTypeId, TieRule
from fedjobs.models.error import DomainError
from fedjobs.models.ledger import TypeAggregates
from fedjobs.services.reputation import reputation_score

logger = logging.getLogger(__name__)


# -----------------------------------------------------------------------------
# Cost model
# -----------------------------------------------------------------------------

def type_aggregates(clients: Sequence[ClientProfile], data_type: DataTypeId) -> TypeAggregates:
    """
    Average cost and average reputation over N_m.

    Raises:
        DomainError: If no client holds ``data_type``
    """
    holdings = [c.holding(data_type) for c in clients if c.holds(data_type)]
    if not holdings:
        raise DomainError(f"No clients hold data type {data_type}", data_type=data_type)

    costs = np.fromiter((h.cost for h in holdings), dtype=float, count=len(holdings))
    scores = np.fromiter(
        (reputation_score(h.rep_success, h.rep_failure) for h in holdings),
        dtype=float,
        count=len(holdings),
    )
    return TypeAggregates(
        data_type=data_type,
        avg_cost=float(costs.mean()),
        avg_reliability=float(scores.mean()),
    )


def job_cost(aggregates: TypeAggregates, supply: int) -> float:
    """(ĉ_m / r̂_m) · a_{k,m}; a single-type job has one term."""
    return aggregates.avg_cost / aggregates.avg_reliability * supply


# -----------------------------------------------------------------------------
# Revenue and utility
# -----------------------------------------------------------------------------

def job_revenue(supply: int, demand: int, payment: float) -> float:
    return supply / demand * payment


def job_utility(supply: int, demand: int, payment: float, cost: float) -> float:
    """(a_k / n_k) p_k - c_k for one job."""
    return job_revenue(supply, demand, payment) - cost


def system_revenue(
    supplies: Sequence[int],
    demands: Sequence[int],
    payments: Sequence[float],
) -> float:
    """f(t) = Σ_k (a_k / n_k) p_k."""
    return float(sum(job_revenue(a, n, p) for a, n, p in zip(supplies, demands, payments)))


def system_utility(
    supplies: Sequence[int],
    demands: Sequence[int],
    payments: Sequence[float],
    costs: Sequence[float],
) -> float:
    """Σ_k [(a_k / n_k) p_k - c_k(t)], the income left after paying clients."""
    return float(
        sum(job_utility(a, n, p, c) for a, n, p, c in zip(supplies, demands, payments, costs))
    )


# -----------------------------------------------------------------------------
# Derivative-follower pricing
# -----------------------------------------------------------------------------

def _sign(x: float) -> int:
    return int(np.sign(x))


def bounded_step(payment: float, move: float, p_min: float, p_max: float) -> float:
    """
    Apply one price move unless it would leave [p_min, p_max].

    A move that would cross a bound holds the price instead, so the price
    stays on p_k(0) + δ·ℤ even when the bounds are not lattice points.
    """
    candidate = payment + move
    if p_min <= candidate <= p_max:
        return candidate
    return payment


def df_price_update(
    payment: float,
    payment_prev: float,
    utility: float,
    utility_prev: float,
    step: float,
    p_min: float,
    p_max: float,
    tie_rule: TieRule = TieRule.FREEZE,
    last_direction: int = 1,
) -> float:
    """
    One derivative-follower step.

    Keep moving the price the way it last moved while utility improves;
    reverse when utility falls.

    Args:
        payment: p_k(t)
        payment_prev: p_k(t-1)
        utility: u_k(t)
        utility_prev: u_k(t-1)
        step: δ > 0
        p_min: Lower payment bound
        p_max: Upper payment bound
        tie_rule: FREEZE keeps the price when either sign is zero;
            CONTINUE substitutes ``last_direction`` for a zero price sign and
            repeats the last move on a utility plateau
        last_direction: Sign of the most recent nonzero price move

    Returns:
        p_k(t+1), kept inside [p_min, p_max]
    """
    s1 = _sign(utility - utility_prev)
    s2 = _sign(payment - payment_prev)

    if tie_rule is TieRule.CONTINUE:
        if s2 == 0:
            s2 = last_direction
        if s1 == 0:
            return bounded_step(payment, step * last_direction, p_min, p_max)

    product = s1 * s2
    if product > 0:
        return bounded_step(payment, step, p_min, p_max)
    if product < 0:
        return bounded_step(payment, -step, p_min, p_max)
    return payment


def price_direction(new_payment: float, payment: float, last_direction: int) -> int:
    """Sign of the move just made, or the previous direction when the price held."""
    move = _sign(new_payment - payment)
    return move if move != 0 else last_direction


def payment_lattice(p_min: float, p_max: float, start: float = 10.0, stop: float = 30.0,
                    step: float = 2.0) -> List[float]:
    """Opening-bid lattice {start, start+step, ..., stop} restricted to the bounds."""
    values = np.arange(start, stop + step / 2, step)
    return [float(v) for v in values if p_min <= v <= p_max]


def within_lattice(payment: float, origin: float, step: float,
                   p_min: float, p_max: float, tol: Optional[float] = None) -> bool:
    """True when ``payment`` lies on origin + step·ℤ inside the bounds."""
    if not p_min <= payment <= p_max:
        return False
    steps = (payment - origin) / step
    tolerance = 1e-9 if tol is None else tol
    return abs(steps - round(steps)) <= tolerance
