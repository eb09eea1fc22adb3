import numpy as np
import pytest
from pydantic import ValidationError

from buymanylab.models import ItemSet, Valuation, ValuationKind


def test_value_per_encoding():
    both = 0b11
    assert Valuation.from_additive([3, 4]).value(both) == 7
    assert Valuation.from_unit_demand([3, 4]).value(both) == 4
    assert Valuation.from_xos([(1, 0), (0, 2)]).value(both) == 2
    assert Valuation.from_table([0, 2, 3, 5]).value(0b01) == 2


def test_tables_agree_across_encodings():
    additive = Valuation.from_additive([1.5, 2.0, 0.25])
    assert np.allclose(additive.to_table().as_table(), additive.as_table())
    assert additive.as_table()[0b111] == pytest.approx(3.75)

    unit = Valuation.from_unit_demand([1, 3, 2])
    assert unit.is_unit_demand()
    assert not additive.is_unit_demand()


def test_table_must_be_monotone():
    with pytest.raises(ValidationError, match="not monotone"):
        Valuation.from_table([0, 3, 1, 2])


def test_table_must_start_at_zero():
    with pytest.raises(ValidationError, match="v\\(empty\\)"):
        Valuation.from_table([1, 2, 2, 3])


def test_table_length_must_be_power_of_two():
    with pytest.raises(ValidationError):
        Valuation.from_table([0, 1, 2])


def test_negative_values_rejected():
    with pytest.raises(ValidationError, match="nonnegative"):
        Valuation.from_additive([1, -1])


def test_xos_clauses_must_match_in_width():
    with pytest.raises(ValidationError):
        Valuation(kind=ValuationKind.XOS, values=((1.0, 2.0), (1.0,)))


def test_value_rejects_items_out_of_range():
    with pytest.raises(ValueError):
        Valuation.from_additive([1, 2]).value(0b100)


def test_scaled_and_single_parameter():
    v = Valuation.from_unit_demand([4, 4, 4])
    assert v.is_single_parameter()
    assert v.scaled(0.5).grand_value() == 2
    assert not Valuation.from_additive([1, 1]).is_single_parameter()


def test_itemset_operations():
    s = ItemSet.from_members([0, 2])
    assert s.members == [0, 2]
    assert s.size == 2
    assert 2 in s and 1 not in s
    assert s.issubset(ItemSet.full(3))
    assert ItemSet.full(3).issuperset(s)
    assert s.union(0b010) == ItemSet.full(3)
    assert s.intersection(0b011) == ItemSet(0b001)
    assert not s.fits(2)

    with pytest.raises(ValueError):
        ItemSet.from_members([3], n=3)
