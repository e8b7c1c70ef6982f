"""
Tests for cost aggregates, utility accounting and derivative-follower pricing.
"""

import numpy as np
import pytest

from fedjobs.models.domain import TieRule
from fedjobs.models.error import DomainError
from fedjobs.models.ledger import TypeAggregates
from fedjobs.services.economics import (
    bounded_step,
    df_price_update,
    job_cost,
    job_utility,
    payment_lattice,
    price_direction,
    system_revenue,
    system_utility,
    type_aggregates,
    within_lattice,
)
from fedjobs.tests.conftest import make_client


class TestAggregates:
    def test_means_over_holders(self):
        clients = [
            make_client(0, types=(0,), cost=1.0),
            make_client(1, types=(0, 1), cost=3.0, successes=2),
            make_client(2, types=(1,), cost=10.0),
        ]
        agg = type_aggregates(clients, 0)
        assert agg.avg_cost == pytest.approx(2.0)
        assert agg.avg_reliability == pytest.approx((0.5 + 0.75) / 2)

    def test_empty_type_raises(self):
        with pytest.raises(DomainError):
            type_aggregates([make_client(0, types=(1,))], 0)

    def test_job_cost(self):
        agg = TypeAggregates(data_type=0, avg_cost=2.0, avg_reliability=0.5)
        assert job_cost(agg, 10) == 40.0
        assert job_cost(agg, 0) == 0.0


class TestUtility:
    def test_system_revenue_and_utility(self):
        supplies, demands, payments, costs = [10, 5], [10, 10], [20.0, 30.0], [40.0, 10.0]
        assert system_revenue(supplies, demands, payments) == pytest.approx(35.0)
        assert system_utility(supplies, demands, payments, costs) == pytest.approx(-15.0)

    def test_job_utility_without_supply_is_zero(self):
        assert job_utility(0, 10, 25.0, 0.0) == 0.0

    def test_utility_is_revenue_minus_costs(self):
        rng = np.random.default_rng(7)
        for _ in range(500):
            size = int(rng.integers(1, 8))
            demands = [int(n) for n in rng.integers(1, 20, size=size)]
            supplies = [int(rng.integers(0, n + 1)) for n in demands]
            payments = [float(p) for p in rng.uniform(2, 100, size=size)]
            costs = [float(c) for c in rng.uniform(0, 200, size=size)]
            revenue = system_revenue(supplies, demands, payments)
            assert system_utility(supplies, demands, payments, costs) == pytest.approx(
                revenue - sum(costs)
            )

    def test_job_cost_is_linear_in_supply(self):
        rng = np.random.default_rng(8)
        for _ in range(200):
            agg = TypeAggregates(data_type=0, avg_cost=float(rng.uniform(1, 3)),
                                 avg_reliability=float(rng.uniform(0.05, 0.95)))
            unit = job_cost(agg, 1)
            for supply in range(12):
                assert job_cost(agg, supply) == pytest.approx(unit * supply)

    def test_revenue_is_linear_in_each_payment(self):
        rng = np.random.default_rng(9)
        for _ in range(200):
            size = int(rng.integers(1, 6))
            demands = [int(n) for n in rng.integers(1, 20, size=size)]
            supplies = [int(rng.integers(0, n + 1)) for n in demands]
            payments = [float(p) for p in rng.uniform(2, 100, size=size)]
            k = int(rng.integers(0, size))
            extra = float(rng.uniform(0, 50))
            raised = list(payments)
            raised[k] += extra
            gain = system_revenue(supplies, demands, raised) - system_revenue(
                supplies, demands, payments
            )
            assert gain == pytest.approx(supplies[k] / demands[k] * extra)


class TestDerivativeFollower:
    def test_keep_direction_while_utility_improves(self):
        assert df_price_update(22, 20, 5.0, 3.0, 2, 2, 100) == 24
        assert df_price_update(18, 20, 5.0, 3.0, 2, 2, 100) == 16

    def test_reverse_when_utility_falls(self):
        assert df_price_update(22, 20, 1.0, 3.0, 2, 2, 100) == 20
        assert df_price_update(18, 20, 1.0, 3.0, 2, 2, 100) == 20

    def test_freeze_on_zero_sign(self):
        assert df_price_update(20, 20, 5.0, 3.0, 2, 2, 100) == 20
        assert df_price_update(22, 20, 3.0, 3.0, 2, 2, 100) == 22

    def test_continue_rule_uses_last_direction(self):
        kwargs = dict(step=2, p_min=2, p_max=100, tie_rule=TieRule.CONTINUE)
        assert df_price_update(20, 20, 5.0, 3.0, last_direction=1, **kwargs) == 22
        assert df_price_update(20, 20, 1.0, 3.0, last_direction=1, **kwargs) == 18
        assert df_price_update(20, 20, 5.0, 3.0, last_direction=-1, **kwargs) == 18
        assert df_price_update(22, 20, 3.0, 3.0, last_direction=-1, **kwargs) == 20

    def test_bounds_hold_the_price(self):
        assert df_price_update(100, 98, 5.0, 3.0, 2, 2, 100) == 100
        assert df_price_update(2, 4, 5.0, 3.0, 2, 2, 100) == 2
        assert df_price_update(99, 97, 5.0, 3.0, 2, 2, 100) == 99
        assert bounded_step(50, -2, 2, 100) == 48
        # held, not clamped to the bound
        assert bounded_step(99, 2, 2, 100) == 99
        assert bounded_step(3, -2, 2, 100) == 3

    def test_price_direction(self):
        assert price_direction(22, 20, -1) == 1
        assert price_direction(18, 20, 1) == -1
        assert price_direction(20, 20, -1) == -1

    @pytest.mark.parametrize("tie_rule", list(TieRule))
    def test_random_walk_stays_on_lattice(self, tie_rule):
        rng = np.random.default_rng(2)
        for _ in range(50):
            origin = float(rng.choice(payment_lattice(2, 100)))
            p_min, p_max = 3.0, 57.0
            payment, payment_prev, direction = origin, origin, 1
            utility_prev = float(rng.normal())
            for _ in range(200):
                utility = float(rng.normal())
                new = df_price_update(
                    payment, payment_prev, utility, utility_prev, 2.0, p_min, p_max,
                    tie_rule=tie_rule, last_direction=direction,
                )
                direction = price_direction(new, payment, direction)
                payment_prev, payment, utility_prev = payment, new, utility
                assert within_lattice(payment, origin, 2.0, p_min, p_max)


def test_payment_lattice():
    assert payment_lattice(2, 100) == [float(p) for p in range(10, 31, 2)]
    assert payment_lattice(15, 20) == [16.0, 18.0, 20.0]
