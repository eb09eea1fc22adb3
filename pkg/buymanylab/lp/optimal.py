import logging
from typing import List, NamedTuple

import numpy as np
from scipy.optimize import linprog

from buymanylab.config import DEFAULT_CONFIG, LabConfig
from buymanylab.errors import CapacityError, InstanceValidationError, SolverError
from buymanylab.models.distribution import TypeDistribution
from buymanylab.models.lottery import Lottery
from buymanylab.models.menu import Menu, Semantics
from buymanylab.pricing.optimizers import PostedPrice, best_bundle_price

logger = logging.getLogger(__name__)

# LP solutions below this magnitude are solver noise
CLIP = 1e-12

# Solver tolerances stay below LabConfig.tolerance so IC holds for the buyer engine
HIGHS_OPTIONS = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}


class OptimalMenu(NamedTuple):
    menu: Menu
    revenue: float


def _lottery_from_solution(weights: np.ndarray, price: float) -> Lottery:
    x = np.where(weights > CLIP, weights, 0.0)
    total = x.sum()
    if total > 1.0:
        x = x / total
        total = 1.0
    pairs = [(s + 1, float(p)) for s, p in enumerate(x) if p > 0]
    slack = 1.0 - sum(p for _, p in pairs)
    if slack > 0:
        pairs.append((0, slack))
    if not pairs:
        pairs = [(0, 1.0)]
    return Lottery(allocation=tuple(pairs), price=max(float(price), 0.0))


def opt_buy_one(
    distribution: TypeDistribution, config: LabConfig = DEFAULT_CONFIG
) -> OptimalMenu:
    """
    Revenue-optimal buy-one mechanism for a finite type distribution.

    Each atom v gets allocation weights x_v(S) for every nonempty S (the remaining mass
    allocates nothing) and a price p_v >= 0. The LP maximises sum_v f(v) p_v subject to
    incentive compatibility for every ordered pair of atoms and individual rationality.
    It is solved with the HiGHS solver in double precision.

    Args:
        distribution (TypeDistribution): The buyer's type distribution.
        config (LabConfig): ``lp_max_atoms`` and ``lp_max_items`` bound the LP size.

    Returns:
        OptimalMenu: The deduplicated menu (one entry per atom) and the LP objective.

    Raises:
        CapacityError: If the distribution has too many atoms or items.
    """
    n = distribution.n
    atoms = len(distribution)
    if atoms > config.lp_max_atoms:
        raise CapacityError("buy-one LP atoms", config.lp_max_atoms, atoms)
    if n > config.lp_max_items:
        raise CapacityError("buy-one LP items", config.lp_max_items, n)

    sets = (1 << n) - 1
    width = sets + 1
    values = np.vstack([a.valuation.as_table()[1:] for a in distribution.atoms])
    n_vars = atoms * width

    def x_slice(k: int) -> slice:
        return slice(k * width, k * width + sets)

    def price_col(k: int) -> int:
        return k * width + sets

    rows: List[np.ndarray] = []
    for k in range(atoms):
        row = np.zeros(n_vars)
        row[x_slice(k)] = 1.0
        rows.append(row)
    for k in range(atoms):
        # IR: v . x_v - p_v >= 0
        row = np.zeros(n_vars)
        row[x_slice(k)] = -values[k]
        row[price_col(k)] = 1.0
        rows.append(row)
        for j in range(atoms):
            if j == k:
                continue
            # IC: v . x_v - p_v >= v . x_w - p_w
            row = np.zeros(n_vars)
            row[x_slice(k)] = -values[k]
            row[price_col(k)] = 1.0
            row[x_slice(j)] += values[k]
            row[price_col(j)] -= 1.0
            rows.append(row)
    a_ub = np.vstack(rows)
    b_ub = np.concatenate([np.ones(atoms), np.zeros(len(rows) - atoms)])

    c = np.zeros(n_vars)
    bounds = []
    for k, atom in enumerate(distribution.atoms):
        c[price_col(k)] = -atom.prob
        bounds.extend([(0.0, 1.0)] * sets + [(0.0, None)])

    logger.debug(f"Buy-one LP: {n_vars} variables, {a_ub.shape[0]} constraints")
    res = linprog(
        c=c,
        A_ub=a_ub,
        b_ub=b_ub,
        bounds=bounds,
        method="highs",
        options=HIGHS_OPTIONS,
    )
    if res.status != 0:
        raise SolverError("Buy-one LP", res.status, res.message)

    entries = [
        _lottery_from_solution(res.x[x_slice(k)], res.x[price_col(k)])
        for k in range(atoms)
    ]
    menu = Menu(entries=tuple(entries), semantics=Semantics.BUY_ONE)
    objective = float(-res.fun)
    logger.info(f"Optimal buy-one revenue {objective:.9g} with {len(menu)} menu entries")
    return OptimalMenu(menu, objective)


def opt_single_parameter(
    distribution: TypeDistribution,
    assume_single_parameter: bool = False,
    config: LabConfig = DEFAULT_CONFIG,
) -> PostedPrice:
    """
    Optimal revenue when every atom values all nonempty sets equally: the best bundle price.

    Raises:
        InstanceValidationError: If an atom is not single-parameter and the caller did not
            assert the structure.
    """
    if not assume_single_parameter:
        for idx, atom in enumerate(distribution.atoms):
            if not atom.valuation.is_single_parameter(config.tolerance):
                raise InstanceValidationError(
                    "atom values some nonempty set below the grand bundle",
                    path=f"distribution.{idx}.valuation",
                )
    return best_bundle_price(distribution, config)
