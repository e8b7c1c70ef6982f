"""
Tests for SF, convergence detection and run / batch summaries.
"""

import math

import numpy as np
import pytest

from fedjobs.models.domain import OracleParams, SchedulerKind
from fedjobs.models.error import UsageError
from fedjobs.models.ledger import RoundLedger, RunSummary
from fedjobs.services.metrics import (
    compare_summaries,
    convergence_round,
    queue_trajectories,
    scheduling_fairness,
    sf_improvement,
    summarize,
    summary_frame,
)
from fedjobs.services.simulator import run_simulation


def _ledger(t, queues, accuracies, revenue=0.0, utility=0.0):
    return RoundLedger(
        round=t,
        schedule=tuple(sorted(accuracies)),
        assignments={k: () for k in accuracies},
        supply={k: 0 for k in accuracies},
        payments={k: 10.0 for k in accuracies},
        utilities={k: 0.0 for k in accuracies},
        costs={k: 0.0 for k in accuracies},
        revenue=revenue,
        system_utility=utility,
        queues_after=dict(enumerate(queues)),
        queue_shares_after={},
        demand_per_type={},
        supply_per_type={},
        accuracies=accuracies,
    )


def _summary(kind, sf, converged=None, seed=0):
    return RunSummary(
        scheduler=kind,
        seed=seed,
        sf=sf,
        convergence_round=converged,
        final_accuracy={0: 0.5, 1: 0.7},
        mean_system_utility=1.0,
        mean_revenue=2.0,
    )


class TestSchedulingFairness:
    def test_identical_queues(self):
        assert scheduling_fairness([[4, 4, 4], [9, 9, 9]]) == 0.0

    def test_single_round(self):
        assert scheduling_fairness([[1, 3]]) == pytest.approx(math.sqrt(2))

    def test_two_rounds(self):
        assert scheduling_fairness([[1, 3], [0, 0]]) == pytest.approx(1.0)

    def test_shift_invariant_and_nonnegative(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            queues = rng.uniform(0, 50, size=(int(rng.integers(1, 20)), int(rng.integers(1, 5))))
            shift = rng.uniform(0, 100, size=(queues.shape[0], 1))
            sf = scheduling_fairness(queues)
            assert sf >= 0.0
            assert scheduling_fairness(queues + shift) == pytest.approx(sf)

    def test_trajectories_from_ledgers(self):
        ledgers = [_ledger(0, [1.0, 3.0], {0: 0.1}), _ledger(1, [0.0, 0.0], {0: 0.1})]
        assert queue_trajectories(ledgers).tolist() == [[1.0, 3.0], [0.0, 0.0]]
        assert scheduling_fairness(queue_trajectories(ledgers)) == pytest.approx(1.0)


class TestConvergence:
    def test_constant_series_converges_at_once(self):
        assert convergence_round({0: [0.4] * 12, 1: [0.6] * 12}, 0.005, 10) == 1

    def test_never_flattening_series(self):
        assert convergence_round({0: [0.01 * t for t in range(50)]}, 0.005, 10) is None

    def test_window_must_fit(self):
        assert convergence_round({0: [0.4] * 5}, 0.005, 10) is None

    def test_slowest_job_decides(self):
        fast = [0.5] * 30
        slow = [0.1 * min(t, 6) for t in range(30)]
        assert convergence_round({0: fast, 1: slow}, 0.005, 5) == 7

    def test_matches_direct_scan_on_saturating_run(self, reference):
        config = reference.model_copy(update={
            "rounds": 120,
            "oracle_overrides": {},
            "oracle": OracleParams(noise_std=0.0, gain_rate=0.2),
        })
        ledgers = run_simulation(config)
        series = {k: [ledger.accuracies[k] for ledger in ledgers] for k in config.job_ids()}
        eps, window = 0.005, 10

        expected = None
        for t in range(len(ledgers) - window + 1):
            ok = True
            for values in series.values():
                peak = max(values[: t + 1])
                if any(abs(values[s] - peak) > eps for s in range(t, t + window)):
                    ok = False
                    break
            if ok:
                expected = t + 1
                break

        assert expected is not None
        assert convergence_round(series, eps, window) == expected


class TestSummaries:
    def test_empty_ledgers_rejected(self):
        with pytest.raises(UsageError):
            summarize([])

    def test_single_round_means(self):
        summary = summarize([_ledger(0, [2.0, 2.0], {0: 0.3, 1: 0.4}, revenue=7.0, utility=-1.5)])
        assert summary.sf == 0.0
        assert summary.mean_revenue == 7.0
        assert summary.mean_system_utility == -1.5
        assert summary.final_accuracy == {0: 0.3, 1: 0.4}
        assert summary.convergence_round is None

    def test_summary_columns(self):
        frame = summary_frame([_summary(SchedulerKind.ALT, 1.0, 12), _summary(SchedulerKind.UB, 2.0)])
        assert list(frame.columns) == [
            "scheduler", "seed", "sf", "convergence_round",
            "final_acc_job0", "final_acc_job1", "mean_system_utility", "mean_revenue",
        ]
        assert frame["convergence_round"].isna().tolist() == [False, True]

    def test_compare_one_row_per_scheduler(self):
        summaries = [
            _summary(SchedulerKind.RANDOM, 4.0, 20, seed=0),
            _summary(SchedulerKind.RANDOM, 6.0, None, seed=1),
            _summary(SchedulerKind.FAIRFEDJS, 1.0, None, seed=0),
            _summary(SchedulerKind.FAIRFEDJS, 3.0, None, seed=1),
        ]
        table = compare_summaries(summaries)
        assert table["scheduler"].tolist() == ["FairFedJS", "Random"]
        assert table["mean_sf"].tolist() == [2.0, 5.0]
        assert table["converged_runs"].tolist() == [0, 1]
        assert table.loc[1, "mean_convergence_round"] == 20.0
        assert table["mean_final_accuracy"].tolist() == pytest.approx([0.6, 0.6])

    def test_batch_means_ignore_seed_order(self):
        summaries = [_summary(SchedulerKind.ALT, float(s), seed=s) for s in range(5)]
        forward = compare_summaries(summaries)
        backward = compare_summaries(list(reversed(summaries)))
        assert forward["mean_sf"].tolist() == pytest.approx(backward["mean_sf"].tolist())

    def test_sf_improvement(self):
        assert sf_improvement(3.0, 4.0) == pytest.approx(0.25)
        assert sf_improvement(0.0, 0.0) == 0.0
