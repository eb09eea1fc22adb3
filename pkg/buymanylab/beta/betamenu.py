"""
The optimal two-item menu for an additive buyer with i.i.d. Beta(1, 2) values.

Each value has density f(v) = 2 - 2v on [0, 1]. The type square splits into four regions:

- A: v1 in [0, x0) and v2 >= (2 - 3 v1) / (4 - 5 v1). Item 2 surely, item 1 with
  probability 2 / (4 - 5 v1)^2, price (15 v1^2 - 20 v1 + 8) / (4 - 5 v1)^2.
- B: the mirror image of A.
- W: v1 >= x0, v2 >= y0 and v1 + v2 >= p*. The bundle at p*.
- Z: everything else. Nothing, for free.
"""

import logging
import math
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np
from numpy.polynomial import Polynomial
from pydantic import BaseModel, ConfigDict

from buymanylab.config import DEFAULT_CONFIG, LabConfig
from buymanylab.engine.buyer import buy_many_best_response, buy_one_best_response
from buymanylab.models.lottery import Lottery
from buymanylab.models.menu import Menu, Semantics
from buymanylab.models.valuation import Valuation

logger = logging.getLogger(__name__)

X0 = 0.0618
Y0 = 0.0618
P_STAR = 0.5535

# Largest item-1 probability of an A entry, and the payment floor of the two-step strategy
ALLOCATION_BOUND = 0.147
WORST_CASE_PAYMENT = 0.5 + (1 - ALLOCATION_BOUND) * 0.5
MIN_B_PRICE = 0.5

# The constants are printed to four decimals
CONSTANT_SLACK = 1e-4
IC_TOLERANCE = 1e-6


class Region(str, Enum):
    Z = "Z"
    A = "A"
    B = "B"
    W = "W"


def boundary(v: np.ndarray) -> np.ndarray:
    """(2 - 3v) / (4 - 5v), the lower edge of A in v2 (and of B in v1)."""
    return (2 - 3 * v) / (4 - 5 * v)


def side_allocation(v: np.ndarray) -> np.ndarray:
    return 2 / (4 - 5 * v) ** 2


def side_price(v: np.ndarray) -> np.ndarray:
    return (15 * v**2 - 20 * v + 8) / (4 - 5 * v) ** 2


def density(v: np.ndarray) -> np.ndarray:
    return 2 - 2 * v


def region_masks(v1: np.ndarray, v2: np.ndarray) -> Dict[Region, np.ndarray]:
    """Boolean membership of every point in A, B and W; Z is what none of them claims."""
    v1 = np.asarray(v1, dtype=float)
    v2 = np.asarray(v2, dtype=float)
    in_a = (v1 < X0) & (v2 >= boundary(np.minimum(v1, X0)))
    in_b = (v2 < Y0) & (v1 >= boundary(np.minimum(v2, Y0)))
    in_w = (v1 >= X0) & (v2 >= Y0) & (v1 + v2 >= P_STAR)
    return {Region.A: in_a, Region.B: in_b, Region.W: in_w, Region.Z: ~(in_a | in_b | in_w)}


def classify(v1: float, v2: float) -> Region:
    masks = region_masks(np.array([v1]), np.array([v2]))
    for region in (Region.A, Region.B, Region.W):
        if masks[region][0]:
            return region
    return Region.Z


class BetaOutcome(BaseModel):
    """Marginal allocation (Pr[item 1], Pr[item 2]) and price designated for one type."""

    model_config = ConfigDict(frozen=True)

    region: Region
    allocation: Tuple[float, float]
    price: float

    def utility(self, v1: float, v2: float) -> float:
        return self.allocation[0] * v1 + self.allocation[1] * v2 - self.price

    def to_lottery(self) -> Lottery:
        """The entry as a lottery over item sets; one item is always allocated surely."""
        a1, a2 = self.allocation
        if self.region is Region.Z:
            return Lottery.null()
        if self.region is Region.W:
            return Lottery.deterministic(0b11, self.price)
        if self.region is Region.A:
            pairs = ((0b10, 1 - a1), (0b11, a1))
        else:
            pairs = ((0b01, 1 - a2), (0b11, a2))
        return Lottery(allocation=pairs, price=self.price)


def beta_outcome(v1: float, v2: float) -> BetaOutcome:
    """
    The designated allocation and price of type (v1, v2).

    Raises:
        ValueError: If the type lies outside [0, 1]^2.
    """
    if not (0 <= v1 <= 1 and 0 <= v2 <= 1):
        raise ValueError(f"type ({v1}, {v2}) is outside [0, 1]^2")
    region = classify(v1, v2)
    if region is Region.A:
        return BetaOutcome(
            region=region,
            allocation=(float(side_allocation(v1)), 1.0),
            price=float(side_price(v1)),
        )
    if region is Region.B:
        return BetaOutcome(
            region=region,
            allocation=(1.0, float(side_allocation(v2))),
            price=float(side_price(v2)),
        )
    if region is Region.W:
        return BetaOutcome(region=region, allocation=(1.0, 1.0), price=P_STAR)
    return BetaOutcome(region=region, allocation=(0.0, 0.0), price=0.0)


def side_entries(grid_step: float) -> np.ndarray:
    """Rows (a, p) of the A entries for v1 on the grid over [0, x0)."""
    v = np.arange(0.0, X0, grid_step)
    return np.column_stack([side_allocation(v), side_price(v)])


def beta_menu(grid_step: float = 1e-3) -> Menu:
    """A finite buy-many menu made of the designated entries of grid types."""
    entries = [Lottery.deterministic(0b11, P_STAR)]
    for a, p in side_entries(grid_step):
        entries.append(Lottery(allocation=((0b10, 1 - a), (0b11, a)), price=float(p)))
        entries.append(Lottery(allocation=((0b01, 1 - a), (0b11, a)), price=float(p)))
    return Menu(entries=tuple(entries), semantics=Semantics.BUY_MANY)


class BetaVerificationReport(BaseModel):
    grid_step: float
    entries_checked: int
    min_margin: float
    min_margin_at: float
    max_allocation: float
    allocation_bound: float = ALLOCATION_BOUND
    worst_case_payment: float = WORST_CASE_PAYMENT
    worst_case_holds: bool
    symmetric_holds: bool
    adaptive_gain_max: Optional[float] = None
    holds: bool


def _side_margins(grid_step: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    v = np.arange(0.0, X0, grid_step)
    a = side_allocation(v)
    margin = side_price(v) + (1 - a) * MIN_B_PRICE - P_STAR
    return v, a, margin


def verify_beta_buy_many(
    grid_step: float = 1e-3,
    adaptive_step: Optional[float] = 0.05,
    config: LabConfig = DEFAULT_CONFIG,
) -> BetaVerificationReport:
    """
    Check that buying an A entry and then topping up with a B entry never beats the bundle.

    For every A entry (a, p) on the v1 grid the two-step strategy pays p + (1 - a) * 0.5,
    which must reach p*, and a must stay below 0.147. The B side is checked on its own grid.
    When ``adaptive_step`` is set, types on that grid also run the buy-many engine against
    :func:`beta_menu` and the largest utility gain over the buy-one choice is reported.
    """
    if grid_step > 1e-3:
        logger.warning(f"Grid step {grid_step} is coarser than 1e-3")
    v, a, margin = _side_margins(grid_step)
    _, a_mirror, margin_mirror = _side_margins(grid_step)
    worst = int(np.argmin(margin))
    worst_case_holds = WORST_CASE_PAYMENT > P_STAR
    holds = bool(np.all(margin >= 0) and np.all(a < ALLOCATION_BOUND) and worst_case_holds)
    symmetric = bool(np.all(margin_mirror >= 0) and np.all(a_mirror < ALLOCATION_BOUND))

    gain = None
    if adaptive_step is not None:
        menu = beta_menu(max(grid_step, 1e-3))
        gain = 0.0
        for t1 in np.arange(0.0, 1.0 + 1e-12, adaptive_step):
            for t2 in np.arange(0.0, 1.0 + 1e-12, adaptive_step):
                valuation = Valuation.from_additive([t1, t2])
                one = buy_one_best_response(valuation, menu, config)
                many = buy_many_best_response(valuation, menu, config)
                gain = max(gain, many.utility - one.utility)
        holds = holds and gain <= config.tolerance

    report = BetaVerificationReport(
        grid_step=grid_step,
        entries_checked=2 * len(v),
        min_margin=float(margin[worst]),
        min_margin_at=float(v[worst]),
        max_allocation=float(a.max()),
        worst_case_holds=worst_case_holds,
        symmetric_holds=symmetric,
        adaptive_gain_max=gain,
        holds=holds and symmetric,
    )
    logger.info(
        f"Beta buy-many check: min margin {report.min_margin:.6f} at v1={report.min_margin_at:.4f}, "
        f"holds={report.holds}"
    )
    return report


def _midpoints(m: int) -> np.ndarray:
    return (np.arange(m) + 0.5) / m


def beta_revenue(points: int = 10_000) -> float:
    """
    Expected payment under the product density, by midpoint quadrature on each region.

    Every region piece is mapped onto the unit square and integrated with about
    ``points`` nodes, so the integrand is smooth on each grid.
    """
    m = max(1, int(math.ceil(math.sqrt(points))))
    s, t = np.meshgrid(_midpoints(m), _midpoints(m), indexing="ij")

    # A: v1 = x0 s, v2 from the boundary up to 1
    v1 = X0 * s
    low = boundary(v1)
    v2 = low + t * (1 - low)
    side = side_price(v1) * density(v1) * density(v2) * X0 * (1 - low)
    side_total = float(side.mean())

    # W, left part: v1 in [x0, p* - y0), v2 from p* - v1 up to 1
    split = P_STAR - Y0
    v1 = X0 + (split - X0) * s
    low = P_STAR - v1
    v2 = low + t * (1 - low)
    left = density(v1) * density(v2) * (split - X0) * (1 - low)

    # W, right part: v1 in [p* - y0, 1], v2 in [y0, 1]
    v1 = split + (1 - split) * s
    v2 = Y0 + (1 - Y0) * t
    right = density(v1) * density(v2) * (1 - split) * (1 - Y0)
    bundle_total = P_STAR * float(left.mean() + right.mean())

    return 2 * side_total + bundle_total


class BetaRevenueReport(BaseModel):
    coarse_points: int
    fine_points: int
    revenue_coarse: float
    revenue_fine: float
    difference: float
    stable: bool
    bundle_price: float
    bundle_revenue: float
    beats_bundle: bool


def beta_revenue_report(
    coarse_points: int = 10_000, fine_points: int = 1_000_000, bundle_step: float = 1e-3
) -> BetaRevenueReport:
    coarse = beta_revenue(coarse_points)
    fine = beta_revenue(fine_points)
    price, bundle = best_beta_bundle_price(bundle_step)
    return BetaRevenueReport(
        coarse_points=coarse_points,
        fine_points=fine_points,
        revenue_coarse=coarse,
        revenue_fine=fine,
        difference=abs(coarse - fine),
        stable=abs(coarse - fine) < 5e-5,
        bundle_price=price,
        bundle_revenue=bundle,
        beats_bundle=fine >= bundle - 1e-9,
    )


def bundle_sale_probability(price: float) -> float:
    """Pr[v1 + v2 >= price] for two independent Beta(1, 2) values."""
    if price <= 0:
        return 1.0
    if price >= 2:
        return 0.0
    f = Polynomial([2.0, -2.0])
    u = Polynomial([price, -1.0])
    cdf_of_rest = 2 * u - u**2
    below = 0.0
    start = 0.0
    if price > 1:
        # the second value is surely below price - v1 when v1 < price - 1
        below += f.integ()(price - 1) - f.integ()(0.0)
        start = price - 1
    inner = (f * cdf_of_rest).integ()
    below += inner(min(price, 1.0)) - inner(start)
    return float(min(1.0, max(0.0, 1.0 - below)))


def best_beta_bundle_price(step: float = 1e-3) -> Tuple[float, float]:
    """Grid search of price * Pr[v1 + v2 >= price] over [0, 2]; ties keep the lower price."""
    best_price, best_revenue = 0.0, 0.0
    for price in np.arange(step, 2.0, step):
        revenue = float(price) * bundle_sale_probability(float(price))
        if revenue > best_revenue + 1e-15:
            best_price, best_revenue = float(price), revenue
    return best_price, best_revenue


class BetaICReport(BaseModel):
    grid_step: float
    types_checked: int
    entries: int
    max_violation: float
    slack: float
    holds: bool
    worst_type: Optional[List[float]] = None


def beta_ic_check(grid_step: float = 1e-2, chunk: int = 4096) -> BetaICReport:
    """
    Every grid type's designated entry must be within the slack of its best designated entry
    of any grid type. The slack covers the four-decimal constants.
    """
    axis = np.round(np.arange(0.0, 1.0 + grid_step / 2, grid_step), 12)
    v1, v2 = (g.ravel() for g in np.meshgrid(axis, axis, indexing="ij"))

    sides = side_entries(grid_step)
    menu = [(1.0, 1.0, P_STAR), (0.0, 0.0, 0.0)]
    menu += [(a, 1.0, p) for a, p in sides] + [(1.0, a, p) for a, p in sides]
    entries = np.array(menu)

    own = np.empty(len(v1))
    masks = region_masks(v1, v2)
    own[masks[Region.Z]] = 0.0
    own[masks[Region.W]] = v1[masks[Region.W]] + v2[masks[Region.W]] - P_STAR
    ia, ib = masks[Region.A], masks[Region.B]
    own[ia] = side_allocation(v1[ia]) * v1[ia] + v2[ia] - side_price(v1[ia])
    own[ib] = v1[ib] + side_allocation(v2[ib]) * v2[ib] - side_price(v2[ib])

    violation = np.empty(len(v1))
    for lo in range(0, len(v1), chunk):
        hi = lo + chunk
        best = (
            np.outer(v1[lo:hi], entries[:, 0]) + np.outer(v2[lo:hi], entries[:, 1]) - entries[:, 2]
        ).max(axis=1)
        violation[lo:hi] = best - own[lo:hi]

    slack = IC_TOLERANCE + CONSTANT_SLACK
    worst = int(np.argmax(violation))
    report = BetaICReport(
        grid_step=grid_step,
        types_checked=len(v1),
        entries=len(entries),
        max_violation=float(max(violation[worst], 0.0)),
        slack=slack,
        holds=bool(violation[worst] <= slack),
        worst_type=[float(v1[worst]), float(v2[worst])],
    )
    logger.debug(f"Beta IC check: max violation {report.max_violation:.3g} over {len(v1)} types")
    return report


class BetaPartitionReport(BaseModel):
    grid_step: float
    points: int
    counts: Dict[str, int]
    overlaps: int
    exhaustive: bool


def beta_partition_check(grid_step: float = 1e-3) -> BetaPartitionReport:
    """Every grid point must fall in exactly one region."""
    axis = np.arange(0.0, 1.0 + grid_step / 2, grid_step)
    v1, v2 = np.meshgrid(axis, axis, indexing="ij")
    masks = region_masks(v1, v2)
    members = sum(masks[r].astype(int) for r in Region)
    overlaps = int((members > 1).sum())
    return BetaPartitionReport(
        grid_step=grid_step,
        points=int(v1.size),
        counts={r.value: int(masks[r].sum()) for r in Region},
        overlaps=overlaps,
        exhaustive=bool(np.all(members == 1)),
    )
