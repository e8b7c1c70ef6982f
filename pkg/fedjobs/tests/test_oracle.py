"""
Tests for the synthetic training oracle.
"""

import numpy as np
import pytest

from fedjobs.models.domain import DataRegime, OracleParams
from fedjobs.services.oracle import SyntheticOracle, effective_quality, oracle_train
from fedjobs.utils.rng import Stream, substream


def _rng(seed=0):
    return substream(seed, Stream.ORACLE, 0, 0)


def test_empty_assignment_stalls():
    outcome = oracle_train(0.4, {}, OracleParams(noise_std=0.0), DataRegime.IID, _rng())
    assert outcome.new_accuracy == 0.4
    assert outcome.per_client_improved == {}


def test_saturated_accuracy_is_fixed_point():
    params = OracleParams(acc_cap=0.9, gain_rate=0.5, noise_std=0.0)
    outcome = oracle_train(0.9, {0: 1.0, 1: 0.8}, params, DataRegime.IID, _rng())
    assert outcome.new_accuracy == 0.9


def test_gain_recurrence():
    params = OracleParams(acc_cap=0.9, gain_rate=0.5, noise_std=0.0)
    outcome = oracle_train(0.5, {3: 1.0, 7: 1.0}, params, DataRegime.IID, _rng())
    assert outcome.new_accuracy == pytest.approx(0.7)
    assert outcome.per_client_improved == {3: True, 7: True}


def test_zero_quality_never_improves():
    params = OracleParams(noise_std=0.0)
    outcome = oracle_train(0.2, {0: 0.0, 1: 0.0}, params, DataRegime.IID, _rng())
    assert outcome.new_accuracy == 0.2
    assert not any(outcome.per_client_improved.values())


def test_noniid_penalty():
    params = OracleParams(noniid_penalty=0.25)
    assert effective_quality(0.8, params, DataRegime.IID) == 0.8
    assert effective_quality(0.8, params, DataRegime.NON_IID) == pytest.approx(0.6)

    slow = oracle_train(0.1, {0: 0.8}, params, DataRegime.NON_IID, _rng())
    fast = oracle_train(0.1, {0: 0.8}, params, DataRegime.IID, _rng())
    assert slow.new_accuracy < fast.new_accuracy


def test_accuracy_stays_within_cap_under_noise():
    params = OracleParams(acc_cap=0.8, noise_std=0.5)
    rng = np.random.default_rng(0)
    for seed in range(200):
        acc = float(rng.uniform(0, 0.8))
        outcome = oracle_train(acc, {0: 0.9, 1: 0.3}, params, DataRegime.IID, _rng(seed))
        assert 0.0 <= outcome.new_accuracy <= 0.8


def test_deterministic_given_stream():
    params = OracleParams(noise_std=0.01)
    qualities = {i: 0.5 for i in range(10)}
    first = SyntheticOracle().train(0.3, qualities, params, DataRegime.IID, _rng(42))
    again = SyntheticOracle().train(0.3, qualities, params, DataRegime.IID, _rng(42))
    assert first == again
