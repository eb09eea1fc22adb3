import pytest

from buymanylab.beta import (
    P_STAR,
    WORST_CASE_PAYMENT,
    Region,
    beta_ic_check,
    beta_outcome,
    beta_partition_check,
    beta_revenue,
    beta_revenue_report,
    bundle_sale_probability,
    classify,
    verify_beta_buy_many,
)


@pytest.mark.parametrize(
    "v1, v2, region",
    [
        (0.9, 0.9, Region.W),
        (0.01, 0.99, Region.A),
        (0.99, 0.01, Region.B),
        (0.1, 0.1, Region.Z),
        (0.0, 0.0, Region.Z),
    ],
)
def test_classify(v1, v2, region):
    assert classify(v1, v2) is region


def test_bundle_outcome():
    outcome = beta_outcome(0.9, 0.9)
    assert outcome.allocation == (1.0, 1.0)
    assert outcome.price == P_STAR
    assert outcome.to_lottery().allocation == ((0b11, 1.0),)


def test_side_outcome():
    outcome = beta_outcome(0.01, 0.99)
    assert outcome.region is Region.A
    assert outcome.allocation[0] == pytest.approx(2 / 3.95**2)
    assert outcome.allocation[0] == pytest.approx(0.12818, abs=1e-5)
    assert outcome.allocation[1] == 1.0
    assert outcome.price == pytest.approx((15e-4 - 0.2 + 8) / 3.95**2)


def test_outcome_outside_square():
    with pytest.raises(ValueError):
        beta_outcome(1.2, 0.5)


def test_worst_case_beats_bundle():
    assert WORST_CASE_PAYMENT == pytest.approx(0.9265)
    assert WORST_CASE_PAYMENT > P_STAR


def test_two_step_strategy_margins():
    report = verify_beta_buy_many(1e-3, adaptive_step=None)
    assert report.holds
    assert report.symmetric_holds
    assert report.min_margin >= 0.37
    assert report.max_allocation < 0.147
    assert report.adaptive_gain_max is None


def test_margin_at_zero():
    report = verify_beta_buy_many(0.1, adaptive_step=None)
    # a single grid point at v1 = 0
    assert report.entries_checked == 2
    assert report.min_margin == pytest.approx(0.384)


def test_engine_finds_no_adaptive_gain():
    report = verify_beta_buy_many(1e-3, adaptive_step=0.25)
    assert report.adaptive_gain_max <= 1e-9
    assert report.holds


def test_partition_is_exhaustive():
    report = beta_partition_check(1e-2)
    assert report.exhaustive
    assert report.overlaps == 0
    assert sum(report.counts.values()) == report.points == 101**2


def test_ic_holds_on_grid():
    report = beta_ic_check(1e-2)
    assert report.holds
    assert report.types_checked == 101**2


def test_bundle_sale_probability_edges():
    assert bundle_sale_probability(0.0) == 1.0
    assert bundle_sale_probability(2.0) == 0.0
    # Pr[v1 + v2 >= 1] for two Beta(1, 2) values
    assert bundle_sale_probability(1.0) == pytest.approx(1 / 6)


def test_revenue_is_stable_and_beats_bundle():
    report = beta_revenue_report(10_000, 250_000, bundle_step=1e-2)
    assert report.difference < 1e-4
    assert report.beats_bundle
    assert report.revenue_fine == pytest.approx(beta_revenue(250_000))
