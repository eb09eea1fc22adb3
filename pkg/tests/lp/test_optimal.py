from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from buymanylab.config import LabConfig
from buymanylab.data_generators import random_distribution
from buymanylab.engine import buy_one_best_response
from buymanylab.errors import CapacityError, InstanceValidationError, SolverError
from buymanylab.lp import opt_buy_one, opt_single_parameter
from buymanylab.models import Semantics, TypeDistribution, Valuation
from buymanylab.pricing import best_bundle_price, best_item_pricing, revenue
from buymanylab.verification import expand_item_pricing


def test_single_atom_extracts_grand_value():
    d = TypeDistribution.point_mass(Valuation.from_additive([3, 4]))
    result = opt_buy_one(d)
    assert result.revenue == pytest.approx(7.0, abs=1e-6)
    assert result.menu.semantics is Semantics.BUY_ONE


def test_two_point_single_item(two_point_distribution):
    assert opt_buy_one(two_point_distribution).revenue == pytest.approx(1.0, abs=1e-6)


def test_perturbed_counterexample(counterexample):
    assert opt_buy_one(counterexample.perturbed).revenue == pytest.approx(3.75, abs=1e-6)
    posted = opt_single_parameter(counterexample.perturbed)
    assert posted.price == 4.0
    assert posted.revenue == pytest.approx(3.75)


@pytest.mark.parametrize(
    "pairs, expected",
    [
        ([(1.0, 5.0)], (5.0, 5.0)),
        ([(0.9, 1.0), (0.1, 10.0)], (1.0, 1.0)),
    ],
)
def test_single_parameter_posted_price(pairs, expected):
    d = TypeDistribution.from_pairs([(p, Valuation.from_additive([v])) for p, v in pairs])
    posted = opt_single_parameter(d)
    assert posted.price == expected[0]
    assert posted.revenue == pytest.approx(expected[1])


def test_single_parameter_rejects_additive():
    d = TypeDistribution.point_mass(Valuation.from_additive([3, 4]))
    with pytest.raises(InstanceValidationError) as exc:
        opt_single_parameter(d)
    assert exc.value.path == "distribution.0.valuation"
    assert opt_single_parameter(d, assume_single_parameter=True).price == 7.0


def test_capacity_limits():
    d = TypeDistribution.point_mass(Valuation.from_additive([1, 1, 1]))
    with pytest.raises(CapacityError):
        opt_buy_one(d, LabConfig(lp_max_items=2))
    with pytest.raises(CapacityError):
        opt_buy_one(TypeDistribution.uniform([Valuation.from_additive([1])] * 3), LabConfig(lp_max_atoms=2))


@pytest.mark.parametrize("seed", [1, 7, 42])
def test_lp_dominates_posted_prices(seed):
    rng = np.random.default_rng(seed)
    d = random_distribution(2, 3, rng)
    lp = opt_buy_one(d).revenue
    assert lp >= best_bundle_price(d).revenue - 1e-6
    pricing = best_item_pricing(d)
    item_menu = expand_item_pricing(pricing.prices, semantics=Semantics.BUY_ONE)
    assert lp >= revenue(item_menu, d) - 1e-6


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(min_value=1, max_value=2),
    atoms=st.integers(min_value=1, max_value=4),
    kind=st.sampled_from(["additive", "unitdemand", "table"]),
    seed=st.integers(min_value=0, max_value=2**32 - 1),
)
def test_returned_menu_earns_the_objective(n, atoms, kind, seed):
    d = random_distribution(n, atoms, np.random.default_rng(seed), kind=kind)
    result = opt_buy_one(d)
    earned = sum(
        atom.prob * buy_one_best_response(atom.valuation, result.menu).payment
        for atom in d.atoms
    )
    assert earned == pytest.approx(result.revenue, abs=1e-6)
    assert revenue(result.menu, d, Semantics.BUY_ONE) == pytest.approx(result.revenue, abs=1e-6)


def test_solver_failure_is_reported(monkeypatch):
    monkeypatch.setattr(
        "buymanylab.lp.optimal.linprog",
        lambda **kwargs: SimpleNamespace(status=2, message="The problem is infeasible."),
    )
    with pytest.raises(SolverError) as exc:
        opt_buy_one(TypeDistribution.point_mass(Valuation.from_additive([1.0])))
    assert exc.value.status == 2
