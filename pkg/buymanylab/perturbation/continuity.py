import logging
import math
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict

from buymanylab.config import DEFAULT_CONFIG, LabConfig
from buymanylab.engine.buyer import buy_many_best_response
from buymanylab.errors import CapacityError, ContinuityInvariantError
from buymanylab.lp.optimal import opt_buy_one
from buymanylab.models.distribution import TypeDistribution
from buymanylab.models.menu import Menu, Semantics
from buymanylab.perturbation.spec import (
    Coupling,
    PerturbationSpec,
    discount_menu,
    epsilon_prime,
    perturb,
)
from buymanylab.pricing.revenue import (
    AlphaDistribution,
    item_pricing_choice,
    q_vector,
    revenue,
)
from buymanylab.verification.buymany import verify_buy_many

logger = logging.getLogger(__name__)

ATOM_COLUMNS = [
    "atom",
    "prob",
    "entry_before",
    "entry_after",
    "price_before",
    "price_after",
    "undiscounted_after",
    "in_a",
    "large_value_ok",
    "top_item",
    "a_class",
]


class AtomRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    atom: int
    prob: float
    entry_before: int
    entry_after: int
    price_before: float
    price_after: float
    undiscounted_after: float
    in_a: bool
    large_value_ok: Optional[bool] = None
    top_item: Optional[int] = None
    a_class: Optional[str] = None


class ContinuityReport(BaseModel):
    """
    Outcome of re-running a discounted menu on a perturbed distribution.

    ``bound_ratio`` is (1 - eps')^2 (1 - 2n sqrt(8 eps n log2(2n)) / eps'), the guaranteed
    fraction of rev_D(M) retained by M' on D'. ``revenue_switched`` is the revenue of M on D
    restricted to the atoms in A.
    """

    epsilon: float
    epsilon_prime: float
    n: int
    revenue_original: float
    revenue_perturbed: float
    ratio: Optional[float]
    bound_ratio: float
    bound_value: float
    bound_vacuous: bool
    revenue_switched: float
    verified: Optional[bool] = None
    opt_perturbed_buy_one: Optional[float] = None
    warnings: List[str] = []
    atoms: List[AtomRecord] = []

    @property
    def switched(self) -> List[int]:
        return [r.atom for r in self.atoms if r.in_a]

    def to_table(self) -> pd.DataFrame:
        return pd.DataFrame([r.model_dump() for r in self.atoms], columns=ATOM_COLUMNS)


def continuity_bound_ratio(epsilon: float, eps_prime: float, n: int) -> float:
    if eps_prime <= 0:
        return 1.0
    if eps_prime >= 1:
        return 0.0
    loss = 2 * n * math.sqrt(8 * epsilon * n * math.log2(2 * n)) / eps_prime
    return (1 - eps_prime) ** 2 * (1 - loss)


def _top_priced_item(
    v, q: np.ndarray, order: np.ndarray, alphas: np.ndarray, config: LabConfig
) -> Optional[int]:
    """The highest-q item that ``v`` ever buys under the scaled prices alpha * q."""
    rank = {int(item): r for r, item in enumerate(order)}
    top = None
    for a in alphas:
        mask, _, _ = item_pricing_choice(v, a * q, config)
        bought = [i for i in range(len(q)) if (mask >> i) & 1]
        if bought:
            best = max(bought, key=lambda i: rank[i])
            if top is None or rank[best] > rank[top]:
                top = best
    return top


def classify_a(
    menu: Menu,
    discounted: Menu,
    distribution: TypeDistribution,
    perturbed: TypeDistribution,
    coupling: Coupling,
    epsilon: float,
    eps_prime: float,
    config: LabConfig = DEFAULT_CONFIG,
) -> ContinuityReport:
    """
    Compare every atom's purchase before and after perturbation.

    An atom is in A when the undiscounted price p' of what its coupled atom buys from the
    discounted menu is below (1 - eps') times the price p it paid before. For such atoms the
    total value must satisfy v([n]) >= eps'^2 p / (2 eps); a violation raises. Each A atom is
    also split by the most expensive item j (in q order) it ever buys under scaled item
    pricing: class ``A_j`` when q_j exceeds sqrt(n eps'^2 / (2 eps log2(2n))) p, else ``A'_j``.

    Raises:
        ContinuityInvariantError: If an A atom has a small total value.
    """
    n = distribution.n
    tol = config.tolerance
    keep = 1.0 - eps_prime
    q = q_vector(menu, n)
    order = np.argsort(q, kind="stable")
    alphas, weights = AlphaDistribution().nodes(n, config)
    alphas = alphas[weights > 0]
    threshold = math.sqrt(n * eps_prime**2 / (2 * epsilon * math.log2(2 * n)))

    records = []
    for k, atom in enumerate(distribution.atoms):
        v = atom.valuation
        v_after = perturbed.atoms[coupling[k]].valuation
        before = buy_many_best_response(v, menu, config)
        after = buy_many_best_response(v_after, discounted, config)
        p = before.payment
        undiscounted = after.payment / keep if keep > 0 else after.payment
        in_a = keep > 0 and undiscounted < keep * p - tol

        large_value_ok = top_item = a_class = None
        if in_a:
            needed = eps_prime**2 * p / (2 * epsilon)
            total = v.grand_value()
            large_value_ok = total >= needed - tol * max(1.0, needed)
            if not large_value_ok:
                raise ContinuityInvariantError(
                    f"atom {k} switched to a cheaper entry but v([n]) = {total} < {needed}"
                )
            top_item = _top_priced_item(v, q, order, alphas, config)
            if top_item is not None:
                a_class = "A_j" if q[top_item] > threshold * p else "A'_j"

        records.append(
            AtomRecord(
                atom=k,
                prob=atom.prob,
                entry_before=before.first_entry,
                entry_after=after.first_entry,
                price_before=p,
                price_after=after.payment,
                undiscounted_after=undiscounted,
                in_a=in_a,
                large_value_ok=large_value_ok,
                top_item=top_item,
                a_class=a_class,
            )
        )

    rev = sum(r.prob * r.price_before for r in records)
    rev_after = sum(r.prob * r.price_after for r in records)
    switched_atoms = [r.atom for r in records if r.in_a]
    switched = (
        revenue(menu, distribution.restricted(switched_atoms), Semantics.BUY_MANY, config)
        if switched_atoms
        else 0.0
    )
    bound_ratio = continuity_bound_ratio(epsilon, eps_prime, n)
    return ContinuityReport(
        epsilon=epsilon,
        epsilon_prime=eps_prime,
        n=n,
        revenue_original=rev,
        revenue_perturbed=rev_after,
        ratio=rev_after / rev if rev > 0 else None,
        bound_ratio=bound_ratio,
        bound_value=bound_ratio * rev,
        bound_vacuous=eps_prime >= 1 or bound_ratio <= 0,
        revenue_switched=switched,
        atoms=records,
    )


def run_continuity_experiment(
    distribution: TypeDistribution,
    spec: PerturbationSpec,
    menu: Menu,
    verified: Optional[bool] = None,
    with_reference_opt: bool = True,
    config: LabConfig = DEFAULT_CONFIG,
) -> ContinuityReport:
    """
    Perturb D, discount ``menu`` by eps' and measure the revenue of the discounted menu on D'.

    ``menu`` should satisfy the buy-many constraint for D. When ``verified`` is None the
    check is run here if the instance is small enough; an unverified or uncheckable menu is
    noted in the report warnings rather than rejected.
    """
    n = distribution.n
    warnings: List[str] = []
    perturbed, coupling = perturb(distribution, spec, config)
    eps_prime = epsilon_prime(spec.epsilon, n)

    if verified is None:
        try:
            verified = verify_buy_many(menu, n, config).holds
        except CapacityError as e:
            warnings.append(f"menu too large to verify: {e}")
    if verified is False:
        warnings.append("menu does not satisfy the buy-many constraint")

    if eps_prime >= 1:
        warnings.append(f"eps' = {eps_prime:.4g} >= 1: no discount applied, bound is vacuous")
        discounted = menu
    else:
        discounted = discount_menu(menu, eps_prime)
    for w in warnings:
        logger.warning(w)

    report = classify_a(
        menu, discounted, distribution, perturbed, coupling, spec.epsilon, eps_prime, config
    )
    if with_reference_opt:
        try:
            report.opt_perturbed_buy_one = opt_buy_one(perturbed, config).revenue
        except CapacityError as e:
            logger.debug(f"Skipping reference optimum: {e}")

    report.verified = verified
    report.warnings = warnings
    logger.info(
        f"Continuity eps={spec.epsilon:g}: rev {report.revenue_original:.6g} -> "
        f"{report.revenue_perturbed:.6g} (bound ratio {report.bound_ratio:.4g})"
    )
    return report


def revenue_ratios(
    distribution: TypeDistribution,
    menu: Menu,
    epsilons: Sequence[float],
    mode: str = "scalar",
    seed: int = 0,
    config: LabConfig = DEFAULT_CONFIG,
) -> List[ContinuityReport]:
    """Run the experiment for several eps with the same perturbation seed."""
    return [
        run_continuity_experiment(
            distribution,
            PerturbationSpec(epsilon=eps, mode=mode, seed=seed),
            menu,
            verified=True,
            with_reference_opt=False,
            config=config,
        )
        for eps in epsilons
    ]
