import math

import pytest

from buymanylab.compression import CompressionRoute, compress, meta_item_compress
from buymanylab.config import LabConfig
from buymanylab.errors import CapacityError
from buymanylab.models import Lottery, Menu, Semantics, TypeDistribution, Valuation
from buymanylab.verification import expand_item_pricing


@pytest.fixture
def unit_demand_buyer():
    return TypeDistribution.point_mass(Valuation.from_unit_demand([3, 0]))


def test_unit_demand_route(item_menu, unit_demand_buyer):
    compressed, report = compress(item_menu, unit_demand_buyer, 0.25)
    assert report.route is CompressionRoute.UNIT_DEMAND
    assert report.stage_counts == {"input": 2, "drop_small": 2, "grid_round": 2}
    assert report.original_size == report.compressed_size == 2
    assert report.revenue_original == pytest.approx(1.0)
    assert report.revenue_compressed == pytest.approx(0.5 * (1 - 2**-4.5))
    assert report.size_bound_ok
    assert report.target_met
    assert report.dropped_purchases == 0
    assert compressed.semantics is Semantics.BUY_MANY


def test_dropped_purchase_is_reported():
    menu = Menu(
        entries=(Lottery(allocation=((0b01, 0.01), (0b10, 0.99)), price=1.0),),
        semantics=Semantics.BUY_MANY,
    )
    d = TypeDistribution.point_mass(Valuation.from_unit_demand([0, 5]))
    compressed, report = compress(menu, d, 0.5)
    assert len(compressed) == 0
    assert report.dropped_purchases == 1
    assert report.dropped_purchase_mass == pytest.approx(1.0)
    assert report.revenue_compressed == 0.0


def test_item_pricing_survives_meta_route():
    menu = expand_item_pricing([1.0, 2.0])
    d = TypeDistribution.point_mass(Valuation.from_additive([3, 3]))
    compressed, report = compress(menu, d, 0.25)
    assert report.route is CompressionRoute.META_ITEM
    assert report.params["items"] == 4
    assert report.compressed_size == len(menu)
    for before, after in zip(menu.entries, compressed.entries):
        assert after.marginals(2).tolist() == before.marginals(2).tolist()
        assert after.price <= before.price


def test_table_valuations_use_meta_items(item_menu):
    d = TypeDistribution.point_mass(Valuation.from_table([0, 2, 2, 3]))
    _, report = compress(item_menu, d, 0.25)
    assert report.route is CompressionRoute.META_ITEM


def test_meta_items_capacity():
    d = TypeDistribution.point_mass(Valuation.from_additive([1.0] * 5))
    with pytest.raises(CapacityError):
        meta_item_compress(Menu(entries=(), semantics=Semantics.BUY_MANY), d, 0.25)


def test_meta_items_on_one_item_match_allocations():
    menu = Menu(
        entries=(Lottery(allocation=((0b1, 0.75), (0, 0.25)), price=1.0),),
        semantics=Semantics.BUY_MANY,
    )
    d = TypeDistribution.point_mass(Valuation.from_additive([4]))
    via_items, _ = compress(menu, TypeDistribution.point_mass(Valuation.from_unit_demand([4])), 0.25)
    via_meta, _ = meta_item_compress(menu, d, 0.25, LabConfig())
    assert via_items.entries[0].marginals(1) == pytest.approx(via_meta.entries[0].marginals(1))


def test_revenue_target_factor_is_reported(item_menu, unit_demand_buyer):
    _, report = compress(item_menu, unit_demand_buyer, 0.01)
    assert report.revenue_target == pytest.approx((1 - 4 * math.sqrt(0.01)) * report.revenue_original)


def _compress_again(menu, d, eps, route):
    if route is CompressionRoute.META_ITEM:
        return meta_item_compress(menu, d, eps)
    return compress(menu, d, eps)


@pytest.mark.parametrize("eps", [0.25, 0.5])
def test_verified_lp_menus_keep_revenue_target(verified_lp_instances, eps):
    for d, menu in verified_lp_instances:
        compressed, report = compress(menu, d, eps)
        assert report.size_bound_ok
        assert report.target_met
        assert report.revenue_compressed >= report.revenue_target - 1e-9

        again, _ = _compress_again(compressed, d, eps, report.route)
        assert len(again) == len(compressed)
        for a, b in zip(compressed.entries, again.entries):
            assert a.allocation == b.allocation
