"""
Shared fixtures for the simulator test suite.
"""

from typing import Dict, Iterable, Optional

import pytest

from fedjobs.models.domain import (
    ClientProfile,
    DatasetHolding,
    JobSpec,
    OracleParams,
    PopulationGroup,
    SimConfig,
)
from fedjobs.services.population import reference_config


def make_client(
    client_id: int,
    types: Iterable[int] = (0,),
    cost: float = 2.0,
    quality: float = 0.9,
    successes: int = 0,
    failures: int = 0,
    selections: Optional[Dict[int, int]] = None,
) -> ClientProfile:
    """Client holding identical datasets for each of ``types``."""
    holding = DatasetHolding(
        cost=cost,
        quality=quality,
        rep_success=successes,
        rep_failure=failures,
        selection_counts=dict(selections or {}),
    )
    return ClientProfile(client_id=client_id, datasets={m: holding for m in types})


@pytest.fixture
def reference():
    """Reference grid, shortened so suites stay fast."""
    return reference_config(seed=0, rounds=40)


@pytest.fixture
def abundant_config():
    """Two jobs, one per type, 20 clients each: every request can be met."""
    return SimConfig(
        num_clients=50,
        num_types=2,
        jobs=[
            JobSpec(job_id=0, data_type=0, demand=20, initial_payment=20.0),
            JobSpec(job_id=1, data_type=1, demand=20, initial_payment=16.0),
        ],
        rounds=30,
        oracle=OracleParams(noise_std=0.0),
        population=[
            PopulationGroup(types=[0], count=20),
            PopulationGroup(types=[1], count=20),
            PopulationGroup(types=[0, 1], count=10),
        ],
        seed=3,
    )
