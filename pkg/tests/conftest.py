import numpy as np
import pytest

from buymanylab.config import LabConfig
from buymanylab.data_generators import random_distribution
from buymanylab.data_generators.counterexample import gen_counterexample
from buymanylab.io.instance import Instance
from buymanylab.lp import opt_buy_one
from buymanylab.models import Lottery, Menu, Semantics, TypeDistribution, Valuation
from buymanylab.verification import verify_buy_many


# Menu fixtures


@pytest.fixture
def config():
    return LabConfig()


@pytest.fixture
def split_menu():
    """One entry giving item 0 or item 1 with equal odds, for 1."""
    return Menu(
        entries=(Lottery(allocation=((0b01, 0.5), (0b10, 0.5)), price=1.0),),
        semantics=Semantics.BUY_MANY,
    )


@pytest.fixture
def item_menu():
    return Menu(
        entries=(Lottery.deterministic(0b01, 1.0), Lottery.deterministic(0b10, 1.0)),
        semantics=Semantics.BUY_MANY,
    )


@pytest.fixture
def bad_bundle_menu():
    """Both items at 1 each, the bundle at 3: buying the items separately is cheaper."""
    return Menu(
        entries=(
            Lottery.deterministic(0b01, 1.0),
            Lottery.deterministic(0b10, 1.0),
            Lottery.deterministic(0b11, 3.0),
        ),
        semantics=Semantics.BUY_MANY,
    )


# Valuation and distribution fixtures


@pytest.fixture
def rich_buyer():
    return Valuation.from_additive([10, 10])


@pytest.fixture
def two_point_distribution():
    """One item worth 1 or 2 with equal probability."""
    return TypeDistribution.from_pairs(
        [(0.5, Valuation.from_additive([1])), (0.5, Valuation.from_additive([2]))]
    )


@pytest.fixture
def counterexample():
    return gen_counterexample(4, 0.5, 1.0)


@pytest.fixture
def minimal_document():
    return {
        "n": 1,
        "distribution": [{"prob": 1.0, "valuation": {"kind": "additive", "values": [2.0]}}],
        "menu": {"semantics": "buyone", "entries": []},
    }


@pytest.fixture
def bad_bundle_instance(bad_bundle_menu):
    return Instance(
        n=2,
        distribution=TypeDistribution.point_mass(Valuation.from_additive([10, 10])),
        menu=bad_bundle_menu,
    )


# Optimal buy-one menus that also satisfy the buy-many constraint


@pytest.fixture(scope="session")
def verified_lp_instances():
    """Fifty (distribution, menu) pairs on two items where the LP menu passes verification."""
    rng = np.random.default_rng(11)
    found = []
    for attempt in range(1000):
        kind = ("unitdemand", "additive")[attempt % 2]
        d = random_distribution(2, int(rng.integers(1, 4)), rng, kind=kind)
        result = opt_buy_one(d)
        if result.revenue > 1e-6 and verify_buy_many(result.menu, 2).holds:
            found.append((d, result.menu))
        if len(found) == 50:
            break
    assert len(found) == 50
    return found
