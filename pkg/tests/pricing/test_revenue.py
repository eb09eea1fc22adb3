import math

import numpy as np
import pytest

from buymanylab.models import Lottery, Menu, Semantics, TypeDistribution, Valuation
from buymanylab.pricing import (
    REVENUE_COLUMNS,
    AlphaDistribution,
    AlphaKind,
    item_pricing_choice,
    item_pricing_revenue,
    q_vector,
    revenue,
    revenue_table,
    scaled_pricing_bound_check,
    scaled_pricing_revenue,
)
from buymanylab.verification import expand_item_pricing


def test_single_item_revenue():
    menu = Menu(entries=(Lottery.deterministic(0b1, 1.0),))
    d = TypeDistribution.point_mass(Valuation.from_additive([2]))
    assert revenue(menu, d) == 1.0


def test_empty_menu_earns_nothing(two_point_distribution):
    assert revenue(Menu(), two_point_distribution) == 0.0


def test_counterexample_item_pricing_earns_n(counterexample):
    rev = revenue(counterexample.menu, counterexample.distribution, Semantics.BUY_MANY)
    assert rev == pytest.approx(4.0, abs=1e-9)


def test_revenue_table_columns(counterexample):
    table = revenue_table(counterexample.menu, counterexample.distribution, Semantics.BUY_MANY)
    assert list(table.columns) == REVENUE_COLUMNS
    assert len(table) == 5
    # the zero atom buys nothing
    assert table.iloc[-1]["payment"] == 0


def test_semantics_override_changes_revenue(bad_bundle_menu):
    d = TypeDistribution.point_mass(Valuation.from_additive([10, 10]))
    assert revenue(bad_bundle_menu, d, Semantics.BUY_ONE) == pytest.approx(3.0)
    assert revenue(bad_bundle_menu, d, Semantics.BUY_MANY) == pytest.approx(2.0)


@pytest.mark.parametrize(
    "entries, n, expected",
    [
        (
            (
                Lottery.deterministic(0b01, 2.0),
                Lottery(allocation=((0b01, 0.5), (0b10, 0.5)), price=1.0),
            ),
            2,
            [2.0, 2.0],
        ),
        ((Lottery.deterministic(0b11, 4.0),), 2, [4.0, 4.0]),
        ((Lottery.deterministic(0b01, 3.0),), 2, [3.0, math.inf]),
    ],
)
def test_q_vector(entries, n, expected):
    assert list(q_vector(Menu(entries=entries), n)) == expected


def test_item_pricing_choice_matches_expanded_menu():
    v = Valuation.from_table([0, 3, 2, 4])
    mask, payment, utility = item_pricing_choice(v, [1.0, 1.5])
    assert mask == 0b01
    assert payment == 1.0
    assert utility == 2.0


def test_item_pricing_choice_blocks_unsold_items():
    v = Valuation.from_additive([5, 5])
    mask, payment, _ = item_pricing_choice(v, [1.0, math.inf])
    assert mask == 0b01
    assert payment == 1.0


def test_item_pricing_revenue_matches_menu_revenue(counterexample):
    prices = counterexample.prices
    d = counterexample.distribution
    assert item_pricing_revenue(prices, d) == pytest.approx(
        revenue(expand_item_pricing(prices), d, Semantics.BUY_MANY)
    )


def test_scaled_pricing_point_alphas():
    d = TypeDistribution.point_mass(Valuation.from_additive([2]))
    assert scaled_pricing_revenue([2.0], d, AlphaDistribution.point(1.0)) == 2.0
    assert scaled_pricing_revenue([2.0], d, AlphaDistribution.point(0.5)) == 1.0


def test_scaled_pricing_rejects_small_alpha():
    d = TypeDistribution.point_mass(Valuation.from_additive([2, 2]))
    with pytest.raises(ValueError):
        scaled_pricing_revenue([2.0, 2.0], d, AlphaDistribution.point(0.1))


def test_alpha_distribution_nodes():
    nodes, weights = AlphaDistribution().nodes(2)
    assert nodes[0] == pytest.approx(0.25)
    assert nodes[-1] == pytest.approx(1.0)
    assert weights.sum() == pytest.approx(1.0)

    discrete = AlphaDistribution(kind=AlphaKind.DISCRETE, points=(0.5, 1.0), weights=(1, 3))
    assert list(discrete.nodes(2)[1]) == [0.25, 0.75]

    with pytest.raises(ValueError):
        AlphaDistribution(kind=AlphaKind.POINT, points=(0.5, 1.0))


def test_scaled_pricing_matches_monte_carlo():
    rng = np.random.default_rng(7)
    d = TypeDistribution.uniform(
        [Valuation.from_additive(rng.uniform(0, 4, size=2)) for _ in range(4)]
    )
    prices = np.array([2.0, 3.0])
    alpha = AlphaDistribution(grid_points=2048)
    exact = scaled_pricing_revenue(prices, d, alpha)

    draws = alpha.sample(2, 4000, rng)
    samples = np.array([item_pricing_revenue(a * prices, d) for a in draws])
    error = samples.std(ddof=1) / math.sqrt(len(samples))
    assert abs(samples.mean() - exact) <= 3 * error + 1e-3


def test_scaled_pricing_bound_on_item_pricing(counterexample):
    short = scaled_pricing_bound_check(counterexample.menu, counterexample.distribution)
    assert short == []
