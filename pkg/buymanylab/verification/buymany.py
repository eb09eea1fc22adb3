import logging
import math
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict

from buymanylab.config import DEFAULT_CONFIG, LabConfig
from buymanylab.engine.buyer import (
    buy_many_best_response,
    buy_one_best_response,
    evaluate_policy,
)
from buymanylab.engine.dominance import dominates
from buymanylab.errors import CapacityError
from buymanylab.models.distribution import TypeDistribution
from buymanylab.models.lottery import Lottery
from buymanylab.models.menu import Menu, Semantics
from buymanylab.models.outcome import STOP, Outcome, Policy

logger = logging.getLogger(__name__)


class ClosureEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    outcome: Outcome
    policy: Policy


class ClosureMenu(BaseModel):
    """The induced buy-one menu: outcomes of adaptive strategies, Pareto-filtered."""

    model_config = ConfigDict(frozen=True)

    n: int
    entries: Tuple[ClosureEntry, ...]
    policies_enumerated: int

    def as_menu(self) -> Menu:
        return Menu(
            entries=tuple(e.outcome.as_lottery() for e in self.entries),
            semantics=Semantics.BUY_ONE,
        )


class VerificationResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    holds: bool
    witness: Optional[Policy] = None
    witness_outcome: Optional[Outcome] = None
    outcomes_checked: int = 0
    policies_enumerated: int = 0


def _successors(lottery: Lottery, state: int) -> List[int]:
    return [state | s for s, _ in lottery.allocation if state | s != state]


def enumerate_policies(
    menu: Menu, n: int, config: LabConfig = DEFAULT_CONFIG
) -> Iterator[Policy]:
    """
    Yield every terminating stationary policy, up to actions on unreachable states.

    Only states reachable from the empty set get an action; all others stop. Two policies
    that agree on their reachable states have the same outcome, so nothing is lost.

    Raises:
        CapacityError: If n exceeds ``config.max_policy_items`` or more than
            ``config.policy_budget`` policies would be produced.
    """
    if n > config.max_policy_items:
        raise CapacityError("policy enumeration items", config.max_policy_items, n)
    menu.check_items(n)
    tol = config.tolerance
    # entries that can grow each state, computed lazily
    growing: Dict[int, List[int]] = {}

    def choices(state: int) -> List[int]:
        if state not in growing:
            growing[state] = [
                idx
                for idx, lottery in enumerate(menu.entries)
                if lottery.self_loop_probability(state) < 1.0 - tol
            ]
        return growing[state]

    produced = 0

    def extend(assigned: Dict[int, int], pending: Tuple[int, ...]) -> Iterator[Policy]:
        nonlocal produced
        if not pending:
            produced += 1
            if produced > config.policy_budget:
                raise CapacityError("policy enumeration", config.policy_budget, produced)
            yield Policy.from_mapping(n, assigned)
            return
        state, rest = pending[0], pending[1:]
        for action in [STOP] + choices(state):
            new = assigned.copy()
            new[state] = action
            frontier = list(rest)
            if action != STOP:
                for nxt in _successors(menu.entries[action], state):
                    if nxt not in new and nxt not in frontier:
                        frontier.append(nxt)
            yield from extend(new, tuple(frontier))

    yield from extend({}, (0,))


def _pareto_filter(
    outcomes: Sequence[Tuple[Outcome, Policy]], config: LabConfig
) -> List[Tuple[Outcome, Policy]]:
    ordered = sorted(outcomes, key=lambda op: op[0].payment)
    kept: List[Tuple[Outcome, Policy]] = []
    for outcome, policy in ordered:
        if any(
            other.payment <= outcome.payment + config.tolerance
            and dominates(other.allocation, outcome.allocation, config)
            for other, _ in kept
        ):
            continue
        kept.append((outcome, policy))
    return kept


def _distinct_outcomes(
    menu: Menu, n: int, config: LabConfig
) -> Tuple[List[Tuple[Outcome, Policy]], int]:
    seen: Dict[tuple, Tuple[Outcome, Policy]] = {}
    count = 0
    for policy in enumerate_policies(menu, n, config):
        count += 1
        outcome = evaluate_policy(policy, menu, config)
        key = (
            tuple((s, round(p, 12)) for s, p in outcome.allocation),
            round(outcome.payment, 12),
        )
        seen.setdefault(key, (outcome, policy))
    logger.debug(f"Enumerated {count} policies with {len(seen)} distinct outcomes")
    return list(seen.values()), count


def closure(menu: Menu, n: int, config: LabConfig = DEFAULT_CONFIG) -> ClosureMenu:
    """
    Compute the buy-many closure of ``menu``.

    Every terminating stationary policy is evaluated; an outcome is dropped when another
    outcome is no more expensive and dominates its allocation.
    """
    outcomes, count = _distinct_outcomes(menu, n, config)
    kept = _pareto_filter(outcomes, config)
    return ClosureMenu(
        n=n,
        entries=tuple(ClosureEntry(outcome=o, policy=p) for o, p in kept),
        policies_enumerated=count,
    )


def verify_buy_many(
    menu: Menu, n: int, config: LabConfig = DEFAULT_CONFIG
) -> VerificationResult:
    """
    Check the buy-many constraint: every adaptive outcome is dominated by a single entry
    (or the null lottery) that costs no more.

    Returns:
        VerificationResult: ``holds`` plus, on failure, the cheapest violating policy.
    """
    result = closure(menu, n, config)
    offers = list(menu.entries) + [Lottery.null()]
    checked = 0
    for entry in result.entries:
        checked += 1
        outcome = entry.outcome
        covered = any(
            offer.price <= outcome.payment + config.tolerance
            and dominates(offer.allocation, outcome.allocation, config)
            for offer in offers
        )
        if not covered:
            logger.info(
                f"Buy-many constraint fails: policy pays {outcome.payment:.6g} for an outcome no entry matches"
            )
            return VerificationResult(
                holds=False,
                witness=entry.policy,
                witness_outcome=outcome,
                outcomes_checked=checked,
                policies_enumerated=result.policies_enumerated,
            )
    return VerificationResult(
        holds=True,
        outcomes_checked=checked,
        policies_enumerated=result.policies_enumerated,
    )


def expand_item_pricing(
    prices: Sequence[float],
    config: LabConfig = DEFAULT_CONFIG,
    semantics: Semantics = Semantics.BUY_MANY,
) -> Menu:
    """
    Turn per-item prices into the menu selling every subset S at sum_{i in S} prices[i].

    Items priced at +inf are never sold, so sets containing them are left out.

    Raises:
        CapacityError: If there are more than ``config.max_table_items`` items.
    """
    n = len(prices)
    if n > config.max_table_items:
        raise CapacityError("item pricing expansion items", config.max_table_items, n)
    if any(p < 0 or math.isnan(p) for p in prices):
        raise ValueError("item prices must be nonnegative")
    entries = []
    for mask in range(1 << n):
        members = [i for i in range(n) if (mask >> i) & 1]
        if any(math.isinf(prices[i]) for i in members):
            continue
        entries.append(Lottery.deterministic(mask, float(sum(prices[i] for i in members))))
    return Menu(entries=tuple(entries), semantics=semantics)


def valuation_level_mismatches(
    menu: Menu, distribution: TypeDistribution, config: LabConfig = DEFAULT_CONFIG
) -> List[int]:
    """Indices of atoms whose buy-many and buy-one responses differ in utility or payment."""
    bad = []
    for idx, atom in enumerate(distribution.atoms):
        one = buy_one_best_response(atom.valuation, menu, config)
        many = buy_many_best_response(atom.valuation, menu, config)
        if (
            abs(one.utility - many.utility) > config.tolerance
            or abs(one.payment - many.payment) > config.tolerance
        ):
            logger.debug(
                f"Atom {idx}: buy-one ({one.utility:.6g}, {one.payment:.6g})"
                f" vs buy-many ({many.utility:.6g}, {many.payment:.6g})"
            )
            bad.append(idx)
    return bad


def valuation_level_check(
    menu: Menu, distribution: TypeDistribution, config: LabConfig = DEFAULT_CONFIG
) -> bool:
    return not valuation_level_mismatches(menu, distribution, config)
