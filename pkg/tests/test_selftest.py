import pytest

from buymanylab.models import Valuation
from buymanylab.selftest import CHECKS, SelftestCheck, brute_force_response, run_selftest


def test_selftest_passes():
    report = run_selftest(seed=0)
    assert [c.name for c in report.checks] == [
        "dp_vs_enumeration",
        "counterexample",
        "dominance",
        "buy_many_verification",
        "compression",
        "beta_buy_many",
    ]
    assert report.passed


def test_failing_check_is_reported(monkeypatch):
    def broken(seed, config):
        raise RuntimeError("boom")

    monkeypatch.setattr("buymanylab.selftest.CHECKS", [broken, *CHECKS[:1]])
    report = run_selftest(seed=1)
    assert not report.passed
    assert report.checks[0] == SelftestCheck(name="broken", passed=False, detail="boom")
    assert report.checks[1].passed


def test_brute_force_prefers_separate_items(bad_bundle_menu):
    utility, payment = brute_force_response(Valuation.from_additive([10, 10]), bad_bundle_menu, 2)
    assert utility == pytest.approx(18.0)
    assert payment == pytest.approx(2.0)
