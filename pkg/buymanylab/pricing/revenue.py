import logging
import math
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from buymanylab.config import DEFAULT_CONFIG, LabConfig
from buymanylab.engine.buyer import best_response
from buymanylab.models.distribution import TypeDistribution
from buymanylab.models.menu import Menu, Semantics
from buymanylab.models.valuation import Valuation
from buymanylab.utils.setfunctions import additive_table

logger = logging.getLogger(__name__)

REVENUE_COLUMNS = ["atom", "prob", "entry", "payment", "utility"]


def revenue_table(
    menu: Menu,
    distribution: TypeDistribution,
    semantics: Optional[Semantics] = None,
    config: LabConfig = DEFAULT_CONFIG,
) -> pd.DataFrame:
    """
    One row per atom: the entry bought first (-1 for none), expected payment and utility.
    """
    rows = []
    for idx, atom in enumerate(distribution.atoms):
        response = best_response(atom.valuation, menu, semantics, config)
        rows.append(
            {
                "atom": idx,
                "prob": atom.prob,
                "entry": response.first_entry,
                "payment": response.payment,
                "utility": response.utility,
            }
        )
    return pd.DataFrame(rows, columns=REVENUE_COLUMNS)


def revenue(
    menu: Menu,
    distribution: TypeDistribution,
    semantics: Optional[Semantics] = None,
    config: LabConfig = DEFAULT_CONFIG,
) -> float:
    """Expected payment of a buyer drawn from ``distribution`` facing ``menu``."""
    if len(menu) == 0:
        return 0.0
    table = revenue_table(menu, distribution, semantics, config)
    return float((table["prob"] * table["payment"]).sum())


def q_vector(menu: Menu, n: int) -> np.ndarray:
    """
    Per-item prices q_i = min over entries (x, p) of p / Pr[i in x].

    Items that no entry ever allocates get +inf.
    """
    q = np.full(n, np.inf)
    for lottery in menu.entries:
        marginals = lottery.marginals(n)
        for i in range(n):
            if marginals[i] > 0:
                q[i] = min(q[i], lottery.price / marginals[i])
    return q


def item_pricing_choice(
    v: Valuation, prices: Sequence[float], config: LabConfig = DEFAULT_CONFIG
) -> Tuple[int, float, float]:
    """
    The set a buyer purchases under item prices, as (mask, payment, utility).

    Item pricing satisfies the buy-many constraint, so the adaptive buyer simply takes the
    utility-maximising set; ties go to the higher payment, then the lower mask.
    """
    table = v.as_table()
    prices = np.asarray(prices, dtype=float)
    if len(prices) != v.n:
        raise ValueError(f"expected {v.n} item prices, got {len(prices)}")
    finite = np.where(np.isinf(prices), 0.0, prices)
    price_table = additive_table(finite)
    utility = table - price_table
    blocked = additive_table(np.isinf(prices).astype(float)) > 0
    utility = np.where(blocked, -np.inf, utility)
    best = utility.max()
    tied = np.flatnonzero(utility >= best - config.tolerance)
    pick = int(tied[np.argmax(price_table[tied])])
    return pick, float(price_table[pick]), float(utility[pick])


def item_pricing_revenue(
    prices: Sequence[float],
    distribution: TypeDistribution,
    config: LabConfig = DEFAULT_CONFIG,
) -> float:
    prices = np.asarray(prices, dtype=float)
    return float(
        sum(
            atom.prob * item_pricing_choice(atom.valuation, prices, config)[1]
            for atom in distribution.atoms
        )
    )


class AlphaKind(str, Enum):
    LOG_UNIFORM = "loguniform"
    POINT = "point"
    DISCRETE = "discrete"


class AlphaDistribution(BaseModel):
    """
    Distribution of the scaling factor applied to item prices.

    The default is the density proportional to 1/alpha on [1/(2n), 1], integrated with a
    trapezoid rule on a log-spaced grid.
    """

    model_config = ConfigDict(frozen=True)

    kind: AlphaKind = AlphaKind.LOG_UNIFORM
    points: Tuple[float, ...] = ()
    weights: Tuple[float, ...] = ()
    grid_points: Optional[int] = Field(default=None, ge=2)

    @model_validator(mode="after")
    def check_support(self) -> "AlphaDistribution":
        if self.kind is AlphaKind.POINT and len(self.points) != 1:
            raise ValueError("a point alpha distribution needs exactly one point")
        if self.kind is AlphaKind.DISCRETE:
            if not self.points or len(self.points) != len(self.weights):
                raise ValueError("discrete alpha distribution needs matching points and weights")
            if any(w < 0 for w in self.weights) or sum(self.weights) <= 0:
                raise ValueError("alpha weights must be nonnegative with positive total")
        if any(not 0 < a <= 1 for a in self.points):
            raise ValueError("alpha must lie in (0, 1]")
        return self

    @classmethod
    def point(cls, alpha: float) -> "AlphaDistribution":
        return cls(kind=AlphaKind.POINT, points=(alpha,))

    def nodes(self, n: int, config: LabConfig = DEFAULT_CONFIG) -> Tuple[np.ndarray, np.ndarray]:
        """Quadrature nodes and normalised weights."""
        if self.kind is AlphaKind.POINT:
            return np.array(self.points), np.ones(1)
        if self.kind is AlphaKind.DISCRETE:
            w = np.array(self.weights)
            return np.array(self.points), w / w.sum()
        count = self.grid_points or config.alpha_grid_points
        log_alpha = np.linspace(math.log(1.0 / (2 * n)), 0.0, count)
        weights = np.ones(count)
        weights[[0, -1]] = 0.5
        return np.exp(log_alpha), weights / weights.sum()

    def sample(self, n: int, size: int, rng: np.random.Generator) -> np.ndarray:
        if self.kind is AlphaKind.LOG_UNIFORM:
            return np.exp(rng.uniform(math.log(1.0 / (2 * n)), 0.0, size=size))
        points, weights = self.nodes(n)
        return rng.choice(points, size=size, p=weights)


def scaled_pricing_revenue(
    prices: Sequence[float],
    distribution: TypeDistribution,
    alpha: AlphaDistribution = AlphaDistribution(),
    config: LabConfig = DEFAULT_CONFIG,
) -> float:
    """E over alpha of the buy-many revenue of item prices alpha * prices."""
    prices = np.asarray(prices, dtype=float)
    nodes, weights = alpha.nodes(distribution.n, config)
    low = 1.0 / (2 * distribution.n)
    if np.any(nodes < low - 1e-12) or np.any(nodes > 1 + 1e-12):
        raise ValueError(f"alpha must be supported on [{low}, 1]")
    return float(
        sum(w * item_pricing_revenue(a * prices, distribution, config) for a, w in zip(nodes, weights))
    )


def scaled_pricing_bound_check(
    menu: Menu,
    distribution: TypeDistribution,
    alpha: AlphaDistribution = AlphaDistribution(),
    config: LabConfig = DEFAULT_CONFIG,
) -> List[int]:
    """
    Compare, atom by atom, scaled item pricing built from ``q_vector(menu)`` against
    rev_v(menu) / (2 log2(2n)). Returns the atoms that fall short; shortfalls are logged.
    """
    n = distribution.n
    q = q_vector(menu, n)
    factor = 1.0 / (2 * math.log2(2 * n))
    nodes, weights = alpha.nodes(n, config)
    short = []
    for idx, atom in enumerate(distribution.atoms):
        menu_payment = best_response(atom.valuation, menu, Semantics.BUY_MANY, config).payment
        scaled = sum(
            w * item_pricing_choice(atom.valuation, a * q, config)[1]
            for a, w in zip(nodes, weights)
        )
        if scaled < factor * menu_payment - config.tolerance:
            logger.warning(
                f"Atom {idx}: scaled pricing earns {scaled:.6g} < {factor:.4g} x {menu_payment:.6g}"
            )
            short.append(idx)
    return short
