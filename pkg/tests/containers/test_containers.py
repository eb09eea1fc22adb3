import json
import math

import numpy as np
import pandas as pd
import pytest

from buymanylab.io.containers import DataContainer, MarginalMenu, ReportTable, dump_json
from buymanylab.models import Lottery, Menu, Semantics


def test_dump_json_is_deterministic():
    first = dump_json({"b": 1.0, "a": [0.1, float("inf")], "c": {"z": 1, "y": math.nan}})
    second = dump_json({"c": {"y": math.nan, "z": 1}, "a": [0.1, float("inf")], "b": 1.0})
    assert first == second
    assert first.endswith("\n")
    assert json.loads(first) == {"a": [0.1, None], "b": 1.0, "c": {"y": None, "z": 1}}


def test_data_container_to_json():
    container = DataContainer(data=[1, 2])
    assert json.loads(container.to_json()) == {"data": [1, 2]}


def test_report_table():
    table = ReportTable(pd.DataFrame({"atom": [0, 1], "payment": [0.1, 2.0]}))
    assert table.columns == ["atom", "payment"]
    assert len(table) == 2
    assert table.to_records()[1] == {"atom": 1, "payment": 2.0}
    assert table.to_csv().splitlines()[0] == "atom,payment"
    assert "0.10000000000000001" in table.to_csv()

    with pytest.raises(TypeError):
        ReportTable([1, 2])


def test_marginal_menu_unit_demand_view():
    menu = Menu(entries=(Lottery.from_marginals([0.25, 0.5], 2.0), Lottery.deterministic(0b10, 1.0)))
    marginal = MarginalMenu.from_unit_demand(menu, 2)
    assert marginal.coordinates == (0b01, 0b10)
    assert marginal.checked_columns == [0, 1]
    assert np.allclose(marginal.data, [[0.25, 0.5], [0.0, 1.0]])
    assert list(marginal.origin) == [0, 1]
    assert marginal.to_menu(Semantics.BUY_ONE) == menu


def test_marginal_menu_meta_item_view():
    menu = Menu(entries=(Lottery(allocation=((0b01, 0.5), (0b11, 0.25), (0, 0.25)), price=1.0),))
    marginal = MarginalMenu.from_meta_items(menu, 2)
    assert marginal.coordinates == (0, 1, 2, 3)
    assert marginal.slack_column == 0
    assert marginal.checked_columns == [1, 2, 3]
    assert np.allclose(marginal.data[0], [0.25, 0.5, 0.0, 0.25])
    assert marginal.to_menu(Semantics.BUY_ONE) == menu


def test_record_stage_counts():
    marginal = MarginalMenu.from_unit_demand(Menu(), 2)
    marginal.record("input")
    assert marginal.stage_counts == {"input": 0}
    assert marginal.to_menu().entries == ()
