import logging
from typing import Dict, List, Optional, Tuple

import numpy as np

from buymanylab.config import DEFAULT_CONFIG, LabConfig
from buymanylab.errors import CapacityError, NonTerminatingPolicyError
from buymanylab.models.lottery import Lottery
from buymanylab.models.menu import Menu, Semantics
from buymanylab.models.outcome import STOP, BestResponse, Outcome, Policy
from buymanylab.models.valuation import Valuation
from buymanylab.utils.setfunctions import popcount, states_by_descending_size

logger = logging.getLogger(__name__)


class _Entry:
    """A menu entry unpacked into arrays for the lattice sweeps."""

    __slots__ = ("sets", "probs", "price")

    def __init__(self, lottery: Lottery):
        self.sets = np.array([s for s, _ in lottery.allocation], dtype=np.int64)
        self.probs = np.array([p for _, p in lottery.allocation], dtype=float)
        self.price = lottery.price

    def split(self, held: int) -> Tuple[np.ndarray, np.ndarray, float]:
        """Return (grown states, their probabilities, self-loop probability)."""
        union = self.sets | held
        grows = union != held
        return union[grows], self.probs[grows], float(self.probs[~grows].sum())


def buy_one_best_response(
    v: Valuation, menu: Menu, config: LabConfig = DEFAULT_CONFIG
) -> BestResponse:
    """
    Pick the single entry (or the null lottery) with the highest utility.

    Among entries within ``config.tolerance`` of the best utility the highest price wins,
    then the lowest index; the null lottery ranks after every stored entry.

    Args:
        v (Valuation): The buyer's valuation.
        menu (Menu): The menu; its semantics tag is ignored.
        config (LabConfig): Tolerances.

    Returns:
        BestResponse: With ``entry`` set to the chosen index, or None for the null lottery.
    """
    menu.check_items(v.n)
    utilities = [lottery.utility(v) for lottery in menu.entries]
    best = max(utilities + [0.0])

    chosen: Optional[int] = None
    chosen_price = 0.0
    for idx, (u, lottery) in enumerate(zip(utilities, menu.entries)):
        if u < best - config.tolerance:
            continue
        if chosen is None or lottery.price > chosen_price:
            chosen, chosen_price = idx, lottery.price
    # the null lottery only wins when no stored entry reaches the tie band with price >= 0
    if chosen is None:
        return BestResponse(utility=0.0, outcome=Outcome.null(), entry=None)

    lottery = menu.entries[chosen]
    return BestResponse(
        utility=utilities[chosen], outcome=Outcome.of_lottery(lottery), entry=chosen
    )


def buy_many_best_response(
    v: Valuation, menu: Menu, config: LabConfig = DEFAULT_CONFIG
) -> BestResponse:
    """
    Compute the buyer's optimal adaptive strategy by a sweep over held sets.

    States are visited from the largest held sets downwards. For state S and entry
    (x, p) with self-loop probability q = Pr[T subset of S] < 1, repeating the purchase until
    the held set grows is worth ``(sum_{T grows S} x_T U(S|T) - p) / (1 - q)``. Entries with
    q = 1 can never help and are skipped.

    Ties within ``config.tolerance`` favour the seller: buying beats stopping, then the
    action with the higher expected payment, then the lower entry index.

    Args:
        v (Valuation): The buyer's valuation.
        menu (Menu): The menu; its semantics tag is ignored.
        config (LabConfig): Tolerances and the item limit for the sweep.

    Returns:
        BestResponse: utility U(empty), the optimal stationary policy and its outcome.

    Raises:
        CapacityError: If v.n exceeds ``config.max_dp_items``.
    """
    n = v.n
    if n > config.max_dp_items:
        raise CapacityError("buy-many best response items", config.max_dp_items, n)
    menu.check_items(n)

    table = v.as_table()
    size = 1 << n
    utility = np.zeros(size)
    payment = np.zeros(size)
    actions = [STOP] * size
    entries = [_Entry(lottery) for lottery in menu.entries]
    tol = config.tolerance

    for state in states_by_descending_size(n):
        stop_value = float(table[state])
        candidates: List[Tuple[float, float, int]] = []
        for idx, entry in enumerate(entries):
            grown, probs, q = entry.split(state)
            if q >= 1.0 - tol:
                continue
            u = (float(probs @ utility[grown]) - entry.price) / (1.0 - q)
            pay = (entry.price + float(probs @ payment[grown])) / (1.0 - q)
            candidates.append((u, pay, idx))

        best = max([stop_value] + [c[0] for c in candidates])
        tied = [c for c in candidates if c[0] >= best - tol]
        utility[state] = best
        if tied:
            # highest payment first, then lowest index
            u, pay, idx = min(tied, key=lambda c: (-c[1], c[2]))
            actions[state] = idx
            payment[state] = pay
            # value of the chosen action, not of the best one
            utility[state] = u

    policy = Policy(n=n, actions=tuple(actions))
    outcome = evaluate_policy(policy, menu, config)
    logger.debug(
        f"Buy-many sweep over {size} states and {len(entries)} entries: U={utility[0]:.6g}"
    )
    return BestResponse(utility=float(utility[0]), outcome=outcome, policy=policy)


def reachable_states(policy: Policy, menu: Menu) -> List[int]:
    """States reachable from the empty set when following ``policy``."""
    seen = {0}
    stack = [0]
    while stack:
        state = stack.pop()
        action = policy.action(state)
        if action == STOP:
            continue
        if action >= len(menu.entries):
            raise ValueError(f"policy buys entry {action} but the menu has {len(menu.entries)}")
        for items, prob in menu.entries[action].allocation:
            nxt = state | items
            if prob > 0 and nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return sorted(seen, key=lambda s: (-popcount(s), s))


def evaluate_policy(
    policy: Policy, menu: Menu, config: LabConfig = DEFAULT_CONFIG
) -> Outcome:
    """
    Expected final allocation and payment of following ``policy`` from the empty set.

    Raises:
        NonTerminatingPolicyError: If a reachable state buys an entry that cannot grow it.
    """
    states = reachable_states(policy, menu)
    entries: Dict[int, _Entry] = {}
    finals: Dict[int, Dict[int, float]] = {}
    payments: Dict[int, float] = {}

    for state in states:
        action = policy.action(state)
        if action == STOP:
            finals[state] = {state: 1.0}
            payments[state] = 0.0
            continue
        entry = entries.setdefault(action, _Entry(menu.entries[action]))
        grown, probs, q = entry.split(state)
        if q >= 1.0 - config.tolerance:
            raise NonTerminatingPolicyError(state=state, entry=action)
        scale = 1.0 / (1.0 - q)
        dist: Dict[int, float] = {}
        pay = entry.price
        for nxt, prob in zip(grown.tolist(), probs.tolist()):
            pay += prob * payments[nxt]
            for final, mass in finals[nxt].items():
                dist[final] = dist.get(final, 0.0) + prob * mass * scale
        finals[state] = dist
        payments[state] = pay * scale

    return Outcome(allocation=tuple(finals[0].items()), payment=payments[0])


def best_response(
    v: Valuation,
    menu: Menu,
    semantics: Optional[Semantics] = None,
    config: LabConfig = DEFAULT_CONFIG,
) -> BestResponse:
    semantics = semantics or menu.semantics
    if Semantics(semantics) is Semantics.BUY_MANY:
        return buy_many_best_response(v, menu, config)
    return buy_one_best_response(v, menu, config)
