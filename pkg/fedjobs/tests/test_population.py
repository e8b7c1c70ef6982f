"""
Tests for config validation, population building and the reference grid.
"""

import pytest

from fedjobs.config import REFERENCE_CONFIG_PATH, get_settings
from fedjobs.models.domain import (
    DataRegime,
    JobSpec,
    JsiQueueMode,
    PopulationGroup,
    SchedulerKind,
    SimConfig,
    TieRule,
)
from fedjobs.models.error import ConfigurationError
from fedjobs.services.economics import payment_lattice
from fedjobs.services.population import build_population, reference_config, validate_config
from fedjobs.utils.file_utils import load_config
from fedjobs.utils.rng import Stream, substream


class TestValidation:
    def test_reference_is_valid(self, reference):
        assert validate_config(reference) == []

    def test_bundled_reference_document_is_valid(self):
        config = load_config(REFERENCE_CONFIG_PATH)
        assert validate_config(config) == []
        assert len(config.jobs) == 6
        assert config.df_tie_rule is TieRule.CONTINUE
        assert config.jsi_queue_mode is JsiQueueMode.PER_TYPE
        assert [s.data_type for s in config.jobs] == [0, 1, 0, 1, 0, 1]

    def test_zero_rounds(self, reference):
        assert validate_config(reference.model_copy(update={"rounds": 0})) == ["rounds must be ≥ 1"]

    def test_zero_demand(self, reference):
        jobs = list(reference.jobs)
        jobs[2] = jobs[2].model_copy(update={"demand": 0})
        assert validate_config(reference.model_copy(update={"jobs": jobs})) == ["demand must be ≥ 1"]

    def test_reports_every_violation(self, reference):
        config = reference.model_copy(update={"sigma": -1.0, "beta": -0.5, "delta": 0.0})
        assert validate_config(config) == [
            "sigma must be ≥ 0",
            "beta must be ≥ 0",
            "delta must be > 0",
        ]

    def test_negative_mjfl_weight(self, reference):
        config = reference.model_copy(update={"mjfl_fairness_weight": -1.0})
        assert validate_config(config) == ["mjfl_fairness_weight must be ≥ 0"]

    def test_initial_payment_outside_bounds(self, reference):
        config = reference.model_copy(update={"p_min": 200.0, "p_max": 300.0})
        problems = validate_config(config)
        assert problems
        assert all("initial_payment must be within [p_min, p_max]" in p for p in problems)

    def test_population_must_match_client_count(self, reference):
        config = reference.model_copy(update={"num_clients": 51})
        assert validate_config(config) == [
            "population counts sum to 50, expected num_clients=51"
        ]

    def test_job_type_without_holders(self, reference):
        population = [PopulationGroup(types=[0], count=50)]
        problems = validate_config(reference.model_copy(update={"population": population}))
        assert problems == [f"job {k}: no client holds data type 1" for k in (1, 3, 5)]


class TestPopulation:
    def test_reference_layout(self, reference):
        clients = build_population(reference, substream(0, Stream.POPULATION))
        assert len(clients) == 50
        assert sum(1 for c in clients if len(c.datasets) == 2) == 10
        assert [c.client_id for c in clients] == list(range(50))
        assert all(set(c.datasets) == {0} for c in clients[:20])
        assert all(set(c.datasets) == {1} for c in clients[20:40])

    def test_costs_and_qualities_in_range(self):
        config = reference_config(seed=4, regime=DataRegime.NON_IID)
        clients = build_population(config, substream(4, Stream.POPULATION))
        for client in clients:
            for holding in client.datasets.values():
                assert 1.0 <= holding.cost <= 3.0
                assert 0.4 <= holding.quality <= 1.0

    def test_same_seed_same_population(self, reference):
        first = build_population(reference, substream(9, Stream.POPULATION))
        again = build_population(reference, substream(9, Stream.POPULATION))
        other = build_population(reference, substream(10, Stream.POPULATION))
        assert first == again
        assert first != other

    def test_default_layout_is_round_robin(self, reference):
        config = reference.model_copy(update={"population": None})
        clients = build_population(config, substream(0, Stream.POPULATION))
        assert [next(iter(c.datasets)) for c in clients[:4]] == [0, 1, 0, 1]

    def test_inconsistent_population_raises(self, reference):
        config = reference.model_copy(update={"num_clients": 40})
        with pytest.raises(ConfigurationError):
            build_population(config, substream(0, Stream.POPULATION))


class TestReferenceConfig:
    def test_grid(self):
        config = reference_config(seed=1)
        assert config.rounds == 150
        assert config.num_types == 2
        assert [s.data_type for s in config.jobs] == [0, 1, 0, 1, 0, 1]
        assert [s.name for s in config.jobs] == ["MLP", "CNN", "ResNet"] * 2
        assert config.jsi_queue_mode is JsiQueueMode.PER_TYPE
        assert sum(s.demand for s in config.jobs) == 60
        assert config.scheduler is SchedulerKind.FAIRFEDJS

    def test_opening_bids_come_from_lattice(self):
        lattice = payment_lattice(2.0, 100.0)
        for seed in range(20):
            assert all(s.initial_payment in lattice for s in reference_config(seed).jobs)

    def test_seeded_bids_are_reproducible(self):
        assert reference_config(seed=3) == reference_config(seed=3)

    def test_model_families_differ(self):
        config = reference_config()
        caps = {config.oracle_for(k).acc_cap for k in config.job_ids()}
        assert len(caps) == 3


class TestConvergenceDefaults:
    def test_defaults_come_from_settings(self, monkeypatch):
        monkeypatch.setenv("FEDJOBS_CONVERGENCE_WINDOW", "7")
        monkeypatch.setenv("FEDJOBS_CONVERGENCE_EPSILON", "0.01")
        get_settings.cache_clear()
        try:
            config = SimConfig(
                num_clients=2,
                num_types=1,
                jobs=[JobSpec(job_id=0, data_type=0, demand=1, initial_payment=10.0)],
                rounds=3,
            )
            assert config.convergence_window == 7
            assert config.convergence_epsilon == 0.01
        finally:
            get_settings.cache_clear()

    def test_explicit_values_win(self, reference):
        config = reference.model_copy(update={"convergence_window": 3})
        assert config.convergence_window == 3
        assert reference.convergence_epsilon == get_settings().convergence_epsilon
