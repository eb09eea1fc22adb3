import pytest
from pydantic import ValidationError

from buymanylab.models import Lottery, MarginalAllocation, Menu, Valuation


def test_lottery_value_and_utility():
    v = Valuation.from_additive([10, 10])
    split = Lottery(allocation=((0b01, 0.5), (0b10, 0.5)), price=1.0)
    assert split.value(v) == 10
    assert split.utility(v) == 9
    assert Lottery.null().value(v) == 0
    assert Lottery.null().utility(v) == 0


def test_lottery_value_from_table():
    v = Valuation.from_table([0, 2, 0, 5])
    lottery = Lottery(allocation=((0b01, 0.5), (0b11, 0.5)), price=0.0)
    assert lottery.value(v) == pytest.approx(3.5)


def test_utility_at_the_participation_boundary():
    v = Valuation.from_unit_demand([3, 4])
    assert Lottery.deterministic(0b10, 4.0).utility(v) == 0


def test_allocation_is_canonical():
    lottery = Lottery(allocation=((0b10, 0.25), (0b01, 0.5), (0b10, 0.25), (0b11, 0.0)), price=2)
    assert lottery.allocation == ((0b01, 0.5), (0b10, 0.5))
    assert lottery.support == (0b01, 0b10)
    assert lottery.is_unit_demand_form()


def test_probabilities_must_sum_to_one():
    with pytest.raises(ValidationError, match="sum to"):
        Lottery(allocation=((0b01, 0.5), (0b10, 0.3)), price=1.0)


def test_price_must_be_nonnegative():
    with pytest.raises(ValidationError):
        Lottery.deterministic(0b01, -1.0)


def test_marginals_and_self_loops():
    lottery = Lottery(allocation=((0b01, 0.5), (0b11, 0.5)), price=1.0)
    assert list(lottery.marginals(2)) == [1.0, 0.5]
    assert lottery.self_loop_probability(0b01) == 0.5
    assert lottery.self_loop_probability(0b11) == 1.0


def test_from_marginals_adds_the_empty_set():
    lottery = Lottery.from_marginals([0.25, 0.5], price=1.0)
    assert dict(lottery.allocation) == {0: 0.25, 0b01: 0.25, 0b10: 0.5}

    marginal = MarginalAllocation.from_lottery(lottery, 2)
    assert marginal.probs == (0.25, 0.5)
    assert marginal.to_lottery(1.0) == lottery


def test_marginal_allocation_rejects_excess_mass():
    with pytest.raises(ValidationError):
        MarginalAllocation(probs=(0.7, 0.7))
    with pytest.raises(ValueError):
        MarginalAllocation.from_lottery(Lottery.deterministic(0b11, 1.0), 2)


def test_menu_keeps_the_cheapest_duplicate():
    menu = Menu(
        entries=(
            Lottery.deterministic(0b01, 2.0),
            Lottery.deterministic(0b10, 1.0),
            Lottery.deterministic(0b01, 1.5),
        )
    )
    assert len(menu) == 2
    assert menu.entries[0].price == 1.5
    assert menu.max_item() == 1

    with pytest.raises(ValueError):
        menu.check_items(1)


def test_menu_discount_keeps_allocations():
    menu = Menu(entries=(Lottery.deterministic(0b01, 1.0),))
    discounted = menu.discounted(0.5)
    assert discounted.entries[0].price == 0.5
    assert discounted.entries[0].allocation == menu.entries[0].allocation
