import json

import pytest

from buymanylab.errors import InstanceValidationError
from buymanylab.io import instance_document, load_instance, save_instance
from buymanylab.models import Semantics


def test_minimal_document_loads(minimal_document):
    instance = load_instance(minimal_document)
    assert instance.n == 1
    assert len(instance.distribution) == 1
    assert len(instance.menu) == 0
    assert instance.menu.semantics is Semantics.BUY_ONE


def test_load_from_json_string_and_path(minimal_document, tmp_path):
    text = json.dumps(minimal_document)
    assert load_instance(text) == load_instance(minimal_document)

    path = tmp_path / "instance.json"
    path.write_text(text)
    assert load_instance(path) == load_instance(minimal_document)
    assert load_instance(str(path)) == load_instance(minimal_document)


def test_non_monotone_table_reports_path(minimal_document):
    minimal_document["n"] = 2
    minimal_document["distribution"][0]["valuation"] = {"kind": "table", "values": [0, 3, 1, 2]}
    with pytest.raises(InstanceValidationError, match="not monotone") as excinfo:
        load_instance(minimal_document)
    assert excinfo.value.path == "distribution.0.valuation"


def test_lottery_probability_sum_reports_path(minimal_document):
    minimal_document["menu"]["entries"] = [
        {"allocation": [{"set": [0], "prob": 0.8}], "price": 1.0}
    ]
    with pytest.raises(InstanceValidationError, match="sum to") as excinfo:
        load_instance(minimal_document)
    assert excinfo.value.path == "menu.entries.0"


def test_item_out_of_range(minimal_document):
    minimal_document["menu"]["entries"] = [
        {"allocation": [{"set": [3], "prob": 1.0}], "price": 1.0}
    ]
    with pytest.raises(InstanceValidationError, match="outside") as excinfo:
        load_instance(minimal_document)
    assert excinfo.value.path == "menu.entries.0"


def test_schema_errors_carry_location(minimal_document):
    minimal_document["n"] = 0
    with pytest.raises(InstanceValidationError) as excinfo:
        load_instance(minimal_document)
    assert excinfo.value.path == "n"


def test_invalid_json():
    with pytest.raises(InstanceValidationError, match="invalid JSON"):
        load_instance("{not json")


def test_wrong_item_count(minimal_document):
    minimal_document["n"] = 2
    with pytest.raises(InstanceValidationError, match="items but n=2"):
        load_instance(minimal_document)


def test_save_then_load_is_identity(counterexample, tmp_path):
    path = tmp_path / "cx.json"
    document = save_instance(counterexample.instance, path)
    loaded = load_instance(path)
    assert loaded == counterexample.instance
    assert instance_document(loaded) == document
    assert json.loads(path.read_text()) == json.loads(json.dumps(document))


def test_xos_document_round_trip():
    document = {
        "n": 2,
        "distribution": [
            {"prob": 1.0, "valuation": {"kind": "xos", "values": [[1.0, 0.0], [0.0, 2.0]]}}
        ],
        "menu": {
            "semantics": "buymany",
            "entries": [
                {
                    "allocation": [{"set": [0], "prob": 0.5}, {"set": [0, 1], "prob": 0.5}],
                    "price": 1.0,
                }
            ],
        },
    }
    instance = load_instance(document)
    assert instance.distribution.valuations[0].value(0b11) == 2
    assert instance_document(instance) == document
