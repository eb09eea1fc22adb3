from typing import Any, Dict, Optional

import numpy as np

from buymanylab.data_generators.basegenerators import BaseGenerator, register_generator
from buymanylab.io.instance import Instance, instance_document
from buymanylab.models.distribution import Atom, TypeDistribution
from buymanylab.models.lottery import Lottery
from buymanylab.models.menu import Menu, Semantics
from buymanylab.models.valuation import Valuation, ValuationKind
from buymanylab.utils.setfunctions import monotone_closure


def _draw(rng: np.random.Generator, size, high: float, decimals: Optional[int]) -> np.ndarray:
    values = rng.uniform(0.0, high, size=size)
    return np.round(values, decimals) if decimals is not None else values


def random_valuation(
    n: int,
    rng: np.random.Generator,
    kind: ValuationKind = ValuationKind.ADDITIVE,
    high: float = 10.0,
    decimals: Optional[int] = 3,
    clauses: int = 2,
) -> Valuation:
    """A random valuation of the given kind with values in [0, high]."""
    kind = ValuationKind(kind)
    if kind is ValuationKind.ADDITIVE:
        return Valuation.from_additive(_draw(rng, n, high / n, decimals))
    if kind is ValuationKind.UNIT_DEMAND:
        return Valuation.from_unit_demand(_draw(rng, n, high, decimals))
    if kind is ValuationKind.XOS:
        return Valuation.from_xos(_draw(rng, (clauses, n), high / n, decimals))
    table = _draw(rng, 1 << n, high, decimals)
    table[0] = 0.0
    return Valuation.from_table(monotone_closure(table))


def random_lottery(
    n: int,
    rng: np.random.Generator,
    support: int = 2,
    unit_demand: bool = False,
    max_price: float = 10.0,
    decimals: Optional[int] = 3,
) -> Lottery:
    """A lottery over ``support`` distinct random sets (singletons when ``unit_demand``)."""
    pool = [1 << i for i in range(n)] if unit_demand else list(range(1, 1 << n))
    k = min(support, len(pool))
    sets = rng.choice(pool, size=k, replace=False)
    probs = rng.dirichlet(np.ones(k))
    if decimals is not None:
        probs = np.round(probs, decimals)
        probs[-1] = 1.0 - probs[:-1].sum()
        if probs[-1] < 0:
            probs = np.full(k, 1.0 / k)
    price = float(_draw(rng, None, max_price, decimals))
    return Lottery(allocation=tuple(zip((int(s) for s in sets), probs.tolist())), price=price)


def random_menu(
    n: int,
    size: int,
    rng: np.random.Generator,
    support: int = 2,
    unit_demand: bool = False,
    max_price: float = 10.0,
    semantics: Semantics = Semantics.BUY_MANY,
) -> Menu:
    entries = tuple(
        random_lottery(
            n,
            rng,
            support=int(rng.integers(1, support + 1)),
            unit_demand=unit_demand,
            max_price=max_price,
        )
        for _ in range(size)
    )
    return Menu(entries=entries, semantics=semantics)


def random_distribution(
    n: int,
    atoms: int,
    rng: np.random.Generator,
    kind: ValuationKind = ValuationKind.ADDITIVE,
    high: float = 10.0,
    decimals: Optional[int] = 3,
) -> TypeDistribution:
    weights = rng.dirichlet(np.ones(atoms))
    return TypeDistribution(
        atoms=tuple(
            Atom(prob=float(w), valuation=random_valuation(n, rng, kind, high, decimals))
            for w in weights
        )
    )


def random_instance(
    n: int,
    atoms: int,
    entries: int,
    rng: np.random.Generator,
    kind: ValuationKind = ValuationKind.ADDITIVE,
    unit_demand_menu: bool = False,
) -> Instance:
    return Instance(
        n=n,
        distribution=random_distribution(n, atoms, rng, kind),
        menu=random_menu(n, entries, rng, unit_demand=unit_demand_menu),
    )


@register_generator
class RandomInstanceGenerator(BaseGenerator):
    kind = "random"

    def generate(
        self,
        seed: int = 0,
        n: int = 2,
        atoms: int = 3,
        entries: int = 3,
        valuation: str = "additive",
        **params: Any,
    ) -> Dict[str, Any]:
        rng = np.random.default_rng(seed)
        return instance_document(random_instance(n, atoms, entries, rng, ValuationKind(valuation)))
