import pytest

from buymanylab.engine import dominates

HALVES = {0b01: 0.5, 0b10: 0.5}


@pytest.mark.parametrize(
    "p, q, expected",
    [
        ({0b11: 1.0}, HALVES, True),
        (HALVES, {0b11: 1.0}, False),
        (HALVES, {0b01: 0.5, 0: 0.5}, True),
        (HALVES, HALVES, True),
        ({0b01: 1.0}, {0b10: 1.0}, False),
        ({0: 1.0}, {0: 1.0}, True),
        ({0b011: 0.5, 0b100: 0.5}, {0b001: 0.5, 0b110: 0.5}, False),
        ({0b011: 0.5, 0b110: 0.5}, {0b001: 0.5, 0b100: 0.5}, True),
    ],
)
def test_dominates(p, q, expected):
    assert dominates(p, q) is expected


def test_dominates_accepts_pairs():
    assert dominates([(0b11, 0.5), (0b11, 0.5)], [(0b01, 1.0)])


def test_marginals_short_circuit():
    # item 0 has mass 0.5 in P but 0.75 in Q
    p = {0b01: 0.5, 0b10: 0.5}
    q = {0b01: 0.75, 0b10: 0.25}
    assert not dominates(p, q)


def test_flow_needed_beyond_marginals():
    # marginals match but {0,1} in Q has no superset in P
    p = {0b01: 0.5, 0b10: 0.5}
    q = {0b11: 0.5, 0: 0.5}
    assert not dominates(p, q)
