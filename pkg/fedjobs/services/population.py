"""
Population and Config Validation

Checks experiment configs against their invariants, builds the seeded
client population, and generates the reference experiment grid.

Usage:
    from fedjobs.services.population import reference_config, validate_config

    config = reference_config(seed=7)
    assert validate_config(config) == []
"""

import logging
from typing import List, Sequence, Tuple

from numpy.random import Generator

from fedjobs.models.domain import (
    ClientProfile,
    DataRegime,
    DataTypeId,
    DatasetHolding,
    JobSpec,
    JsiQueueMode,
    OracleParams,
    PopulationGroup,
    SchedulerKind,
    SimConfig,
    TieRule,
)
from fedjobs.models.error import ConfigurationError
from fedjobs.services.economics import payment_lattice
from fedjobs.utils.rng import Stream, substream

logger = logging.getLogger(__name__)

SEED_LIMIT = 2 ** 64


# ============================================================================
# Validation
# ============================================================================

def _validate_oracle(label: str, params: OracleParams) -> List[str]:
    problems = []
    if not 0.0 < params.acc_cap <= 1.0:
        problems.append(f"{label}: acc_cap must be in (0, 1]")
    if params.gain_rate <= 0.0:
        problems.append(f"{label}: gain_rate must be > 0")
    if params.noise_std < 0.0:
        problems.append(f"{label}: noise_std must be ≥ 0")
    if not 0.0 <= params.noniid_penalty < 1.0:
        problems.append(f"{label}: noniid_penalty must be in [0, 1)")
    if not 0.0 <= params.initial_accuracy <= params.acc_cap:
        problems.append(f"{label}: initial_accuracy must be in [0, acc_cap]")
    return problems


def _validate_population(config: SimConfig) -> List[str]:
    if config.population is None:
        return []
    problems = []
    for index, group in enumerate(config.population):
        if not group.types:
            problems.append(f"population group {index}: types must not be empty")
        if len(set(group.types)) != len(group.types):
            problems.append(f"population group {index}: types must be unique")
        if any(not 0 <= m < config.num_types for m in group.types):
            problems.append(f"population group {index}: data types must be in [0, num_types)")
        if group.count < 1:
            problems.append(f"population group {index}: count must be ≥ 1")
    total = sum(group.count for group in config.population)
    if total != config.num_clients:
        problems.append(f"population counts sum to {total}, expected num_clients={config.num_clients}")
    return problems


def validate_config(config: SimConfig) -> List[str]:
    """
    Every invariant violation of ``config``; empty when the config is valid.

    Never raises: structural problems are pydantic's job, range problems are
    reported here all at once.
    """
    problems: List[str] = []

    if config.rounds < 1:
        problems.append("rounds must be ≥ 1")
    if config.num_clients < 1:
        problems.append("num_clients must be ≥ 1")
    if config.num_types < 1:
        problems.append("num_types must be ≥ 1")
    if config.sigma < 0:
        problems.append("sigma must be ≥ 0")
    if config.beta < 0:
        problems.append("beta must be ≥ 0")
    if config.mjfl_fairness_weight < 0:
        problems.append("mjfl_fairness_weight must be ≥ 0")
    if config.delta <= 0:
        problems.append("delta must be > 0")
    if config.p_min > config.p_max:
        problems.append("p_min must be ≤ p_max")
    if not 0 <= config.seed < SEED_LIMIT:
        problems.append("seed must be in [0, 2^64)")
    if not config.jobs:
        problems.append("at least one job is required")

    job_ids = config.job_ids()
    if len(set(job_ids)) != len(job_ids):
        problems.append("job ids must be unique")

    for spec in config.jobs:
        if spec.demand < 1:
            problems.append("demand must be ≥ 1")
        if not 0 <= spec.data_type < config.num_types:
            problems.append(f"job {spec.job_id}: data_type must be in [0, num_types)")
        if spec.initial_payment <= 0:
            problems.append(f"job {spec.job_id}: initial_payment must be > 0")
        if not config.p_min <= spec.initial_payment <= config.p_max:
            problems.append(f"job {spec.job_id}: initial_payment must be within [p_min, p_max]")

    low, high = config.cost_range
    if low <= 0 or low > high:
        problems.append("cost_range must satisfy 0 < low ≤ high")
    for regime, (q_low, q_high) in config.quality_ranges.items():
        if not 0.0 <= q_low <= q_high <= 1.0:
            problems.append(f"quality_ranges[{DataRegime(regime).value}] must satisfy 0 ≤ low ≤ high ≤ 1")

    problems.extend(_validate_oracle("oracle", config.oracle))
    for job_id, params in sorted(config.oracle_overrides.items()):
        if job_id not in job_ids:
            problems.append(f"oracle_overrides: unknown job {job_id}")
        problems.extend(_validate_oracle(f"oracle_overrides[{job_id}]", params))

    if config.convergence_epsilon <= 0:
        problems.append("convergence_epsilon must be > 0")
    if config.convergence_window < 1:
        problems.append("convergence_window must be ≥ 1")

    population_problems = _validate_population(config)
    problems.extend(population_problems)
    if not population_problems and config.num_clients >= 1 and config.num_types >= 1:
        held = set()
        for types in client_types(config):
            held.update(types)
        for spec in config.jobs:
            if 0 <= spec.data_type < config.num_types and spec.data_type not in held:
                problems.append(f"job {spec.job_id}: no client holds data type {spec.data_type}")

    return problems


# ============================================================================
# Population
# ============================================================================

def client_types(config: SimConfig) -> List[List[DataTypeId]]:
    """
    Data types held by each client id, in id order.

    Raises:
        ConfigurationError: If the population groups do not add up to N
    """
    if config.population is None:
        return [[i % config.num_types] for i in range(config.num_clients)]

    layout: List[List[DataTypeId]] = []
    for group in config.population:
        layout.extend([sorted(group.types)] * group.count)
    if len(layout) != config.num_clients:
        raise ConfigurationError(
            f"Population describes {len(layout)} clients, expected {config.num_clients}",
            num_clients=config.num_clients,
        )
    return layout


def build_population(config: SimConfig, rng: Generator) -> List[ClientProfile]:
    """
    Draw every client's holdings.

    Holdings are drawn client by client, type by type in ascending order:
    cost ~ U(cost_range), then quality ~ U(quality range of the regime).

    Raises:
        ConfigurationError: If the population is inconsistent with N
    """
    cost_low, cost_high = config.cost_range
    quality_low, quality_high = config.quality_range()

    clients: List[ClientProfile] = []
    for client_id, types in enumerate(client_types(config)):
        datasets = {}
        for m in types:
            cost = float(rng.uniform(cost_low, cost_high))
            quality = float(rng.uniform(quality_low, quality_high))
            datasets[m] = DatasetHolding(cost=cost, quality=quality)
        clients.append(ClientProfile(client_id=client_id, datasets=datasets))

    logger.debug(f"Built population of {len(clients)} clients over {config.num_types} data types")
    return clients


# ============================================================================
# Reference grid
# ============================================================================

# Three model families, each with its own learning curve.
REFERENCE_MODELS: Sequence[Tuple[str, OracleParams]] = (
    ("MLP", OracleParams(acc_cap=0.85, gain_rate=0.15, noise_std=0.002)),
    ("CNN", OracleParams(acc_cap=0.90, gain_rate=0.10, noise_std=0.002)),
    ("ResNet", OracleParams(acc_cap=0.92, gain_rate=0.07, noise_std=0.002)),
)

REFERENCE_POPULATION = (
    PopulationGroup(types=[0], count=20),
    PopulationGroup(types=[1], count=20),
    PopulationGroup(types=[0, 1], count=10),
)


def reference_config(
    seed: int = 0,
    scheduler: SchedulerKind = SchedulerKind.FAIRFEDJS,
    rounds: int = 150,
    regime: DataRegime = DataRegime.IID,
) -> SimConfig:
    """
    Six jobs over two data types competing for 50 clients.

    Job k trains on data type k mod 2 with model family k mod 3, so each type
    hosts all three families and neighbouring ids alternate types. Each job
    asks for 10 clients per round, so demand (60) exceeds the 50 distinct
    clients. Opening bids come from {10, 12, ..., 30} via the seed's payment
    stream. The JSI charges each job with its type queue.
    """
    delta, p_min, p_max = 2.0, 2.0, 100.0
    lattice = payment_lattice(p_min, p_max, start=10.0, stop=30.0, step=delta)
    rng = substream(seed, Stream.PAYMENTS)

    jobs: List[JobSpec] = []
    overrides = {}
    for job_id in range(6):
        name, params = REFERENCE_MODELS[job_id % len(REFERENCE_MODELS)]
        jobs.append(JobSpec(
            job_id=job_id,
            data_type=job_id % 2,
            demand=10,
            initial_payment=float(rng.choice(lattice)),
            name=name,
        ))
        overrides[job_id] = params

    return SimConfig(
        num_clients=50,
        num_types=2,
        jobs=jobs,
        rounds=rounds,
        sigma=1.0,
        beta=0.5,
        delta=delta,
        p_min=p_min,
        p_max=p_max,
        scheduler=scheduler,
        oracle_overrides=overrides,
        data_regime=regime,
        seed=seed,
        population=list(REFERENCE_POPULATION),
        cost_range=(1.0, 3.0),
        jsi_queue_mode=JsiQueueMode.PER_TYPE,
        df_tie_rule=TieRule.CONTINUE,
    )
