import pytest
from pydantic import ValidationError

from buymanylab.models import STOP, Lottery, Outcome, Policy, Valuation


def test_policy_from_mapping():
    policy = Policy.from_mapping(2, {0: 1, 0b01: 0})
    assert policy.action(0) == 1
    assert policy.action(0b11) == STOP
    assert policy.buying_states() == {0: 1, 0b01: 0}
    assert policy.describe() == [{"held": [], "entry": 1}, {"held": [0], "entry": 0}]


def test_policy_needs_one_action_per_state():
    with pytest.raises(ValidationError):
        Policy(n=2, actions=(STOP, STOP))


def test_outcome_round_trip_through_lottery():
    outcome = Outcome(allocation={0b11: 1.0}, payment=3.0)
    assert outcome.as_lottery() == Lottery.deterministic(0b11, 3.0)
    assert outcome.utility(Valuation.from_additive([10, 10])) == 17
    assert outcome.describe() == {"allocation": [{"set": [0, 1], "prob": 1.0}], "payment": 3.0}


def test_null_outcome():
    assert Outcome.null().allocation == ((0, 1.0),)
    assert Outcome.null().payment == 0
