import logging
from enum import Enum
from typing import Dict, List, Optional, Set, Tuple

from pydantic import BaseModel

from buymanylab.compression.components import DropSmall, GridRound
from buymanylab.compression.params import CompressionParams
from buymanylab.compression.pipeline import CompressionPipeline
from buymanylab.config import DEFAULT_CONFIG, LabConfig
from buymanylab.engine.buyer import buy_many_best_response, reachable_states
from buymanylab.errors import CapacityError
from buymanylab.io.containers.marginalmenu import MarginalMenu
from buymanylab.models.distribution import TypeDistribution
from buymanylab.models.menu import Menu, Semantics
from buymanylab.models.outcome import STOP

logger = logging.getLogger(__name__)


class CompressionRoute(str, Enum):
    UNIT_DEMAND = "unit_demand"
    META_ITEM = "meta_item"


class CompressionReport(BaseModel):
    """
    Summary of one compression run.

    ``dropped_purchases`` counts the atoms whose buy-many policy on the input menu used an
    entry removed by the small-coordinate stage; ``dropped_purchase_mass`` is their
    probability.
    """

    route: CompressionRoute
    n: int
    params: Dict[str, float]
    original_size: int
    compressed_size: int
    stage_counts: Dict[str, int]
    revenue_original: float
    revenue_compressed: float
    revenue_target: float
    target_met: bool
    size_bound_log10: float
    size_bound_ok: bool
    dropped_purchases: int
    dropped_purchase_mass: float
    notes: List[str] = []


def _marginal_form(menu: Menu, n: int, meta: bool) -> MarginalMenu:
    if meta:
        return MarginalMenu.from_meta_items(menu, n)
    return MarginalMenu.from_unit_demand(menu, n)


def drop_small(menu: Menu, n: int, params: CompressionParams, meta: bool = False) -> Menu:
    """Remove entries with a coordinate in (0, delta); survivors are priced x (1 - sqrt(eps))."""
    return DropSmall(params)(_marginal_form(menu, n, meta)).to_menu(menu.semantics)


def grid_round(menu: Menu, n: int, params: CompressionParams, meta: bool = False) -> Menu:
    """Round coordinates down to the grid, price x (1 - sqrt(delta)), keep the cheapest duplicate."""
    return GridRound(params)(_marginal_form(menu, n, meta)).to_menu(menu.semantics)


def _needs_meta_items(menu: Menu, distribution: TypeDistribution, config: LabConfig) -> bool:
    if not all(lottery.is_unit_demand_form() for lottery in menu.entries):
        return True
    return not all(v.is_unit_demand(config.tolerance) for v in distribution.valuations)


def _used_entries(menu: Menu, distribution: TypeDistribution, config: LabConfig):
    """Buy-many revenue of ``menu`` and the entries each atom's policy may buy."""
    total = 0.0
    used: List[Set[int]] = []
    for atom in distribution.atoms:
        response = buy_many_best_response(atom.valuation, menu, config)
        total += atom.prob * response.payment
        entries = {response.policy.action(s) for s in reachable_states(response.policy, menu)}
        used.append(entries - {STOP})
    return total, used


def _run(
    menu: Menu,
    distribution: TypeDistribution,
    params: CompressionParams,
    route: CompressionRoute,
    config: LabConfig,
) -> Tuple[Menu, CompressionReport]:
    n = distribution.n
    menu.check_items(n)
    source = menu.with_semantics(Semantics.BUY_MANY)
    marginal = _marginal_form(source, n, route is CompressionRoute.META_ITEM)
    result = CompressionPipeline(params)(marginal)
    compressed = result.to_menu(Semantics.BUY_MANY)

    size_ok = params.within_size_bound(len(compressed))
    if not size_ok:
        raise AssertionError(
            f"compressed menu has {len(compressed)} entries, above (1 + 1/step)^{params.items}"
        )

    rev, used = _used_entries(source, distribution, config)
    rev_compressed = 0.0
    if len(compressed):
        rev_compressed = sum(
            atom.prob * buy_many_best_response(atom.valuation, compressed, config).payment
            for atom in distribution.atoms
        )
    target = params.revenue_target_factor * rev

    removed = set(result.removed.get("drop_small", []))
    hit = [k for k, entries in enumerate(used) if entries & removed]
    notes = [
        "rounded allocations are offered at the discounted price of the entry they came from"
    ]
    if rev_compressed < target - config.tolerance:
        logger.warning(
            f"Compressed revenue {rev_compressed:.6g} is below the target {target:.6g}"
        )

    report = CompressionReport(
        route=route,
        n=n,
        params=params.describe(),
        original_size=len(source),
        compressed_size=len(compressed),
        stage_counts=result.stage_counts,
        revenue_original=rev,
        revenue_compressed=rev_compressed,
        revenue_target=target,
        target_met=rev_compressed >= target - config.tolerance,
        size_bound_log10=params.size_bound_log10(),
        size_bound_ok=size_ok,
        dropped_purchases=len(hit),
        dropped_purchase_mass=float(sum(distribution.atoms[k].prob for k in hit)),
        notes=notes,
    )
    logger.info(
        f"Compressed {report.original_size} -> {report.compressed_size} entries "
        f"({route.value}); revenue {rev:.6g} -> {rev_compressed:.6g}"
    )
    return compressed, report


def compress(
    menu: Menu,
    distribution: TypeDistribution,
    epsilon: float,
    config: LabConfig = DEFAULT_CONFIG,
    params: Optional[CompressionParams] = None,
) -> Tuple[Menu, CompressionReport]:
    """
    Drop small coordinates, then round to the grid, and compare buy-many revenues on D.

    Menus or distributions that are not unit-demand are routed through
    :func:`meta_item_compress`. ``params`` overrides the default constants for the
    unit-demand route.

    Raises:
        CapacityError: If the revenue evaluation or meta-item encoding is too large.
    """
    if _needs_meta_items(menu, distribution, config):
        logger.debug("Menu or distribution is not unit-demand; using meta-items")
        return meta_item_compress(menu, distribution, epsilon, config)
    params = params or CompressionParams(epsilon=epsilon, items=distribution.n)
    return _run(menu, distribution, params, CompressionRoute.UNIT_DEMAND, config)


def meta_item_compress(
    menu: Menu,
    distribution: TypeDistribution,
    epsilon: float,
    config: LabConfig = DEFAULT_CONFIG,
) -> Tuple[Menu, CompressionReport]:
    """
    Compress over the 2^n subsets treated as unit-demand meta-items.

    Each lottery becomes its distribution over subsets; the empty set is the slack
    coordinate. All derived constants use 2^n in place of n.

    Raises:
        CapacityError: If n exceeds ``config.meta_max_items``.
    """
    n = distribution.n
    if n > config.meta_max_items:
        raise CapacityError("meta-item compression", config.meta_max_items, n)
    params = CompressionParams(epsilon=epsilon, items=1 << n)
    return _run(menu, distribution, params, CompressionRoute.META_ITEM, config)
