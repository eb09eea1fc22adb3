import itertools
import logging
from typing import List, NamedTuple, Sequence, Tuple

import numpy as np

from buymanylab.config import DEFAULT_CONFIG, LabConfig
from buymanylab.models.distribution import TypeDistribution
from buymanylab.utils.setfunctions import additive_table

logger = logging.getLogger(__name__)


class PostedPrice(NamedTuple):
    price: float
    revenue: float


class ItemPricing(NamedTuple):
    prices: Tuple[float, ...]
    revenue: float
    heuristic: bool


def best_posted_price(
    values: Sequence[float], probs: Sequence[float], tolerance: float = 1e-9
) -> PostedPrice:
    """
    Best take-it-or-leave-it price for a buyer whose value is ``values[k]`` w.p. ``probs[k]``.

    Only support values are tried; ties keep the lowest price.
    """
    values = np.asarray(values, dtype=float)
    probs = np.asarray(probs, dtype=float)
    best = PostedPrice(0.0, 0.0)
    for price in np.unique(values[values > 0]):
        rev = float(price * probs[values >= price - tolerance].sum())
        if rev > best.revenue + tolerance:
            best = PostedPrice(float(price), rev)
    return best


def best_bundle_price(
    distribution: TypeDistribution, config: LabConfig = DEFAULT_CONFIG
) -> PostedPrice:
    values = [a.valuation.grand_value() for a in distribution.atoms]
    return best_posted_price(values, distribution.probs, config.tolerance)


def best_single_item_price(
    distribution: TypeDistribution, item: int, config: LabConfig = DEFAULT_CONFIG
) -> PostedPrice:
    if not 0 <= item < distribution.n:
        raise ValueError(f"item {item} out of range for n={distribution.n}")
    values = [a.valuation.value(1 << item) for a in distribution.atoms]
    return best_posted_price(values, distribution.probs, config.tolerance)


class ItemPricingEvaluator:
    """Vectorised buy-many revenue of item prices over all atoms at once."""

    def __init__(self, distribution: TypeDistribution, config: LabConfig = DEFAULT_CONFIG):
        self.n = distribution.n
        self.tables = np.vstack([a.valuation.as_table() for a in distribution.atoms])
        self.probs = distribution.probs
        self.tolerance = config.tolerance

    def __call__(self, prices: Sequence[float]) -> float:
        prices = np.asarray(prices, dtype=float)
        blocked = additive_table(np.isinf(prices).astype(float)) > 0
        price_table = additive_table(np.where(np.isinf(prices), 0.0, prices))
        utility = np.where(blocked, -np.inf, self.tables - price_table)
        best = utility.max(axis=1, keepdims=True)
        tied = utility >= best - self.tolerance
        payments = np.where(tied, price_table, -np.inf).max(axis=1)
        return float(self.probs @ payments)

    def candidates(self, item: int, limit: int) -> Tuple[List[float], bool]:
        """Positive marginal values of ``item`` over all atoms and sets, plus +inf."""
        idx = np.arange(1 << self.n)
        without = idx[(idx >> item) & 1 == 0]
        marginal = self.tables[:, without | (1 << item)] - self.tables[:, without]
        values = np.unique(np.round(marginal[marginal > self.tolerance], 12))
        thinned = len(values) > limit
        if thinned:
            picks = np.linspace(0, len(values) - 1, limit).round().astype(int)
            values = values[np.unique(picks)]
        return [float(x) for x in values] + [float("inf")], thinned


def best_item_pricing(
    distribution: TypeDistribution,
    config: LabConfig = DEFAULT_CONFIG,
    seed: int = 0,
    restarts: int = 4,
    grid_limit: int = 20_000,
    candidate_limit: int = 64,
) -> ItemPricing:
    """
    Search item prices over per-item candidate grids.

    For n <= 3 with a small enough grid the product of candidate grids is searched
    exhaustively; otherwise coordinate descent with random restarts is used and the result
    is flagged as heuristic.
    """
    evaluate = ItemPricingEvaluator(distribution, config)
    n = distribution.n
    grids, thinned = zip(*(evaluate.candidates(i, candidate_limit) for i in range(n)))
    product = int(np.prod([len(g) for g in grids]))

    if n <= 3 and product <= grid_limit:
        best_prices, best_rev = None, -1.0
        for prices in itertools.product(*grids):
            rev = evaluate(prices)
            if rev > best_rev + config.tolerance:
                best_prices, best_rev = prices, rev
        return ItemPricing(tuple(best_prices), best_rev, any(thinned))

    logger.info(f"Item pricing grid has {product} points; using coordinate descent")
    rng = np.random.default_rng(seed)
    best_prices, best_rev = None, -1.0
    for restart in range(restarts):
        if restart == 0:
            current = [grids[i][0] for i in range(n)]
        else:
            current = [grids[i][rng.integers(len(grids[i]))] for i in range(n)]
        current_rev = evaluate(current)
        for _ in range(100):
            improved = False
            for i in range(n):
                for candidate in grids[i]:
                    trial = list(current)
                    trial[i] = candidate
                    rev = evaluate(trial)
                    if rev > current_rev + config.tolerance:
                        current, current_rev, improved = trial, rev, True
            if not improved:
                break
        if current_rev > best_rev + config.tolerance:
            best_prices, best_rev = current, current_rev
    return ItemPricing(tuple(best_prices), best_rev, True)
