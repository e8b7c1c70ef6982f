"""
Training Oracle

Synthetic stand-in for one round of federated training. It turns the set of
assigned clients into a new accuracy for the job and into per-client
"did this update help" flags that feed the reputation counters.

Any object with a matching ``train`` method can replace the synthetic oracle.
"""

import logging
from typing import Mapping, Protocol

import numpy as np
from numpy.random import Generator

from fedjobs.models.domain import DataRegime, OracleParams
from fedjobs.models.ledger import TrainingOutcome

logger = logging.getLogger(__name__)


class TrainingOracle(Protocol):
    """Interface the simulator trains through."""

    def train(
        self,
        accuracy: float,
        qualities: Mapping[int, float],
        params: OracleParams,
        regime: DataRegime,
        rng: Generator,
    ) -> TrainingOutcome:
        ...


def effective_quality(quality: float, params: OracleParams, regime: DataRegime) -> float:
    """Latent quality, degraded by ``noniid_penalty`` under the NonIID regime."""
    if regime is DataRegime.NON_IID:
        return quality * (1.0 - params.noniid_penalty)
    return quality


def oracle_train(
    accuracy: float,
    qualities: Mapping[int, float],
    params: OracleParams,
    regime: DataRegime,
    rng: Generator,
) -> TrainingOutcome:
    """
    One synthetic training round.

    new_acc = clamp(acc + g (A_cap - acc) q̄ + noise, 0, A_cap), where q̄ is
    the mean effective quality of the assigned clients (0 when none, so the
    job stalls). The noise draw comes first, then one Bernoulli flag per
    client in ascending client id.

    Args:
        accuracy: Accuracy before this round
        qualities: Latent quality per assigned client id
        params: Oracle parameters of this job
        regime: IID or NonIID
        rng: Per (round, job) generator

    Returns:
        TrainingOutcome with the new accuracy and per-client improvement flags
    """
    noise = float(rng.normal(0.0, params.noise_std))

    client_ids = sorted(qualities)
    effective = np.array(
        [effective_quality(qualities[i], params, regime) for i in client_ids],
        dtype=float,
    )
    mean_quality = float(effective.mean()) if client_ids else 0.0

    raw = accuracy + params.gain_rate * (params.acc_cap - accuracy) * mean_quality + noise
    new_accuracy = float(np.clip(raw, 0.0, params.acc_cap))

    draws = rng.random(len(client_ids))
    improved = {
        client_id: bool(draw < q)
        for client_id, draw, q in zip(client_ids, draws, effective)
    }
    return TrainingOutcome(new_accuracy=new_accuracy, per_client_improved=improved)


class SyntheticOracle:
    """Default oracle; stateless, so one instance serves every job."""

    def train(
        self,
        accuracy: float,
        qualities: Mapping[int, float],
        params: OracleParams,
        regime: DataRegime,
        rng: Generator,
    ) -> TrainingOutcome:
        return oracle_train(accuracy, qualities, params, regime, rng)
