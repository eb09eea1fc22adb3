import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from buymanylab.config import LabConfig
from buymanylab.data_generators import random_menu, random_valuation
from buymanylab.engine import (
    buy_many_best_response,
    buy_one_best_response,
    evaluate_policy,
    reachable_states,
)
from buymanylab.errors import CapacityError, NonTerminatingPolicyError
from buymanylab.models import STOP, Lottery, Menu, Policy, Valuation
from buymanylab.selftest import brute_force_response


def test_buy_one_empty_menu():
    response = buy_one_best_response(Valuation.from_additive([1, 2]), Menu())
    assert response.entry is None
    assert response.utility == 0
    assert response.payment == 0
    assert response.first_entry == STOP


def test_buy_one_picks_highest_utility():
    menu = Menu(entries=(Lottery.deterministic(0b01, 3.0), Lottery.deterministic(0b11, 5.0)))
    response = buy_one_best_response(Valuation.from_additive([4, 3]), menu)
    assert response.entry == 1
    assert response.utility == pytest.approx(2.0)


def test_buy_one_tie_goes_to_higher_price():
    menu = Menu(entries=(Lottery.deterministic(0b01, 3.0), Lottery.deterministic(0b11, 5.0)))
    response = buy_one_best_response(Valuation.from_additive([4, 2]), menu)
    assert response.entry == 1
    assert response.payment == 5.0


def test_buy_many_repeats_split_lottery(split_menu, rich_buyer):
    response = buy_many_best_response(rich_buyer, split_menu)
    assert response.utility == pytest.approx(17.0)
    assert response.payment == pytest.approx(3.0)
    assert response.outcome.allocation == ((0b11, pytest.approx(1.0)),)


def test_buy_many_stops_when_nothing_pays(split_menu):
    response = buy_many_best_response(Valuation.from_additive([0.4, 0.4]), split_menu)
    assert response.utility == 0
    assert response.outcome.allocation == ((0, 1.0),)
    assert response.policy.action(0) == STOP


def test_buy_many_combines_deterministic_entries(item_menu, rich_buyer):
    response = buy_many_best_response(rich_buyer, item_menu)
    assert response.utility == pytest.approx(18.0)
    assert response.payment == pytest.approx(2.0)


def test_buy_many_near_tie_reports_utility_of_purchase():
    # buying is 5e-10 worse than stopping, inside the tolerance, so the seller wins the tie
    menu = Menu(entries=(Lottery.deterministic(0b1, 1.0 + 5e-10),))
    v = Valuation.from_additive([1.0])
    response = buy_many_best_response(v, menu)
    assert response.policy.action(0) == 0
    assert response.payment == pytest.approx(1.0 + 5e-10, abs=1e-15)
    assert response.utility < 0
    assert response.utility == pytest.approx(response.outcome.utility(v), abs=1e-15)


def test_buy_many_respects_item_limit():
    config = LabConfig(max_dp_items=2)
    with pytest.raises(CapacityError):
        buy_many_best_response(Valuation.from_additive([1, 1, 1]), Menu(), config)


def test_evaluate_stop_everywhere(split_menu):
    outcome = evaluate_policy(Policy.stop_everywhere(2), split_menu)
    assert outcome.allocation == ((0, 1.0),)
    assert outcome.payment == 0


def test_evaluate_repeat_until_both(split_menu):
    policy = Policy.from_mapping(2, {0: 0, 0b01: 0, 0b10: 0})
    outcome = evaluate_policy(policy, split_menu)
    assert outcome.payment == pytest.approx(3.0)
    assert outcome.allocation == ((0b11, pytest.approx(1.0)),)
    assert reachable_states(policy, split_menu) == [0b11, 0b01, 0b10, 0]


def test_evaluate_single_purchase(item_menu):
    outcome = evaluate_policy(Policy.from_mapping(2, {0: 0}), item_menu)
    assert outcome.allocation == ((0b01, 1.0),)
    assert outcome.payment == 1.0


def test_evaluate_rejects_non_terminating_policy(item_menu):
    policy = Policy.from_mapping(2, {0: 0, 0b01: 0})
    with pytest.raises(NonTerminatingPolicyError):
        evaluate_policy(policy, item_menu)


@settings(max_examples=500, deadline=None)
@given(
    n=st.integers(min_value=1, max_value=3),
    entries=st.integers(min_value=1, max_value=3),
    seed=st.integers(min_value=0, max_value=2**32 - 1),
)
def test_buy_many_matches_policy_enumeration(n, entries, seed):
    rng = np.random.default_rng(seed)
    menu = random_menu(n, entries, rng)
    v = random_valuation(n, rng, kind="table")

    dp = buy_many_best_response(v, menu)
    utility, payment = brute_force_response(v, menu, n)
    assert dp.utility == pytest.approx(utility, abs=1e-9)
    assert dp.payment == pytest.approx(payment, abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
def test_buy_many_dominates_buy_one(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    menu = random_menu(n, int(rng.integers(0, 5)), rng)
    v = random_valuation(n, rng, kind="additive")

    many = buy_many_best_response(v, menu)
    one = buy_one_best_response(v, menu)
    assert many.utility >= one.utility - 1e-9
    assert one.utility >= 0

