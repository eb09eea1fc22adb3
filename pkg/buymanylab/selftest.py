import logging
from typing import Callable, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel

from buymanylab.beta.betamenu import verify_beta_buy_many
from buymanylab.compression.compress import compress
from buymanylab.config import DEFAULT_CONFIG, LabConfig
from buymanylab.data_generators.counterexample import gen_counterexample
from buymanylab.data_generators.randominstances import random_menu, random_valuation
from buymanylab.engine.buyer import buy_many_best_response, evaluate_policy
from buymanylab.engine.dominance import dominates
from buymanylab.lp.optimal import opt_single_parameter
from buymanylab.models.distribution import TypeDistribution
from buymanylab.models.lottery import Lottery
from buymanylab.models.menu import Menu, Semantics
from buymanylab.models.valuation import Valuation
from buymanylab.pricing.revenue import revenue
from buymanylab.verification.buymany import (
    enumerate_policies,
    expand_item_pricing,
    verify_buy_many,
)

logger = logging.getLogger(__name__)


class SelftestCheck(BaseModel):
    name: str
    passed: bool
    detail: str = ""


class SelftestReport(BaseModel):
    seed: int
    checks: List[SelftestCheck]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def brute_force_response(
    v: Valuation, menu: Menu, n: int, config: LabConfig = DEFAULT_CONFIG
) -> Tuple[float, float]:
    """Best (utility, payment) over every stationary policy; ties go to the larger payment."""
    best: Optional[Tuple[float, float]] = None
    for policy in enumerate_policies(menu, n, config):
        outcome = evaluate_policy(policy, menu, config)
        candidate = (outcome.utility(v), outcome.payment)
        if best is None or candidate[0] > best[0] + config.tolerance:
            best = candidate
        elif abs(candidate[0] - best[0]) <= config.tolerance and candidate[1] > best[1]:
            best = candidate
    return best


def _dp_matches_enumeration(seed: int, config: LabConfig, trials: int = 40) -> SelftestCheck:
    rng = np.random.default_rng(seed)
    for trial in range(trials):
        n = int(rng.integers(1, 3))
        menu = random_menu(n, int(rng.integers(1, 4)), rng)
        v = random_valuation(n, rng, kind="table")
        dp = buy_many_best_response(v, menu, config)
        utility, payment = brute_force_response(v, menu, n, config)
        if abs(dp.utility - utility) > 1e-9 or abs(dp.payment - payment) > 1e-9:
            return SelftestCheck(
                name="dp_vs_enumeration",
                passed=False,
                detail=f"trial {trial}: dp ({dp.utility}, {dp.payment}) vs ({utility}, {payment})",
            )
    return SelftestCheck(name="dp_vs_enumeration", passed=True, detail=f"{trials} instances")


def _counterexample(seed: int, config: LabConfig) -> SelftestCheck:
    example = gen_counterexample(4, 0.5, 1.0)
    rev = revenue(example.menu, example.distribution, Semantics.BUY_MANY, config)
    opt = opt_single_parameter(example.perturbed, config=config)
    passed = (
        abs(rev - 4.0) <= 1e-9
        and abs(opt.revenue - 3.75) <= 1e-6
        and example.coupling_valid(config.tolerance)
    )
    return SelftestCheck(
        name="counterexample",
        passed=passed,
        detail=f"pricing revenue {rev:.12g}, opt(D') {opt.revenue:.12g} at price {opt.price:g}",
    )


def _dominance(seed: int, config: LabConfig) -> SelftestCheck:
    half = {0b01: 0.5, 0b10: 0.5}
    passed = (
        dominates(half, half, config)
        and dominates({0b11: 1.0}, {0b01: 1.0}, config)
        and not dominates({0b01: 1.0}, {0b11: 1.0}, config)
        and dominates({0b11: 1.0}, half, config)
    )
    return SelftestCheck(name="dominance", passed=passed)


def _verification(seed: int, config: LabConfig) -> SelftestCheck:
    rng = np.random.default_rng(seed)
    prices = rng.uniform(0.5, 5.0, size=2)
    pricing_ok = verify_buy_many(expand_item_pricing(prices, config), 2, config).holds
    bad = Menu(
        entries=(
            Lottery.deterministic(0b01, 1.0),
            Lottery.deterministic(0b10, 1.0),
            Lottery.deterministic(0b11, 3.0),
        ),
        semantics=Semantics.BUY_MANY,
    )
    result = verify_buy_many(bad, 2, config)
    witness_ok = (
        not result.holds
        and result.witness_outcome is not None
        and abs(result.witness_outcome.payment - 2.0) <= 1e-9
    )
    return SelftestCheck(
        name="buy_many_verification",
        passed=pricing_ok and witness_ok,
        detail=f"item pricing holds={pricing_ok}, bad menu witness ok={witness_ok}",
    )


def _compression(seed: int, config: LabConfig) -> SelftestCheck:
    rng = np.random.default_rng(seed)
    distribution = TypeDistribution.uniform(
        [random_valuation(2, rng, kind="unitdemand") for _ in range(3)]
    )
    menu = random_menu(2, 3, rng, unit_demand=True)
    compressed, report = compress(menu, distribution, 0.25, config)
    again, _ = compress(compressed, distribution, 0.25, config)
    fixpoint = [e.allocation for e in again.entries] == [e.allocation for e in compressed.entries]
    return SelftestCheck(
        name="compression",
        passed=report.size_bound_ok and fixpoint,
        detail=f"{report.original_size} -> {report.compressed_size} entries, fixpoint={fixpoint}",
    )


def _beta(seed: int, config: LabConfig) -> SelftestCheck:
    report = verify_beta_buy_many(1e-3, adaptive_step=None, config=config)
    return SelftestCheck(
        name="beta_buy_many",
        passed=report.holds and report.min_margin >= 0.37,
        detail=f"min margin {report.min_margin:.6f}",
    )


CHECKS: List[Callable[[int, LabConfig], SelftestCheck]] = [
    _dp_matches_enumeration,
    _counterexample,
    _dominance,
    _verification,
    _compression,
    _beta,
]


def run_selftest(seed: int = 0, config: LabConfig = DEFAULT_CONFIG) -> SelftestReport:
    """Run the in-process oracle checks and report each one."""
    checks = []
    for check in CHECKS:
        try:
            result = check(seed, config)
        except Exception as e:
            logger.exception(f"Self-test {check.__name__} raised")
            result = SelftestCheck(name=check.__name__.lstrip("_"), passed=False, detail=str(e))
        logger.info(f"{result.name}: {'ok' if result.passed else 'FAILED'} {result.detail}")
        checks.append(result)
    return SelftestReport(seed=seed, checks=checks)
