import logging
import math
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from buymanylab.data_generators.basegenerators import BaseGenerator, register_generator
from buymanylab.data_generators.setsystems import BasicSetSystem, sample_basic_sets
from buymanylab.errors import InstanceValidationError
from buymanylab.io.instance import Instance, instance_document
from buymanylab.models.distribution import Atom, TypeDistribution
from buymanylab.models.lottery import Lottery
from buymanylab.models.menu import Menu, Semantics
from buymanylab.models.valuation import Valuation
from buymanylab.utils.setfunctions import members_of

logger = logging.getLogger(__name__)


def truncated_geometric_pmf(cap: float) -> Dict[float, float]:
    """
    Pr[t = 2^a] proportional to 2^-a for a = 1..floor(log2 cap).

    For a power-of-two cap H the normaliser is 1 - 1/H.

    Raises:
        ValueError: If cap < 2.
    """
    if cap < 2:
        raise ValueError(f"truncated geometric needs a cap of at least 2, got {cap}")
    top = int(math.floor(math.log2(cap) + 1e-12))
    norm = 1.0 - 2.0 ** (-top)
    return {2.0**a: 2.0 ** (-a) / norm for a in range(1, top + 1)}


def truncated_geometric(
    cap: float,
    seed: Optional[int] = 0,
    size: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
):
    """Draw one value (or ``size`` values) from :func:`truncated_geometric_pmf`."""
    pmf = truncated_geometric_pmf(cap)
    rng = rng if rng is not None else np.random.default_rng(seed)
    values = np.array(list(pmf.keys()))
    probs = np.array(list(pmf.values()))
    draw = rng.choice(values, size=size, p=probs / probs.sum())
    return float(draw) if size is None else tuple(float(t) for t in draw)


def truncated_geometric_mean(cap: float) -> float:
    return sum(t * p for t, p in truncated_geometric_pmf(cap).items())


class HardFamilyParams(BaseModel):
    """
    Desk-scale parameters of the unit-demand hard family.

    Attributes:
        n: Number of items.
        s: Size of every basic set.
        b: Largest allowed intersection of two basic sets.
        count: Number of basic sets (and atoms).
        value_cap: H, the largest threshold t.
        seed: Seed for the set sampler and the thresholds.
        thresholds: Optional fixed thresholds t_i in [1, H].
    """

    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1)
    s: int = Field(ge=1)
    b: int = Field(ge=0)
    count: int = Field(ge=1)
    value_cap: float
    seed: int = 0
    thresholds: Optional[Tuple[float, ...]] = None
    retry_budget: int = 100_000

    @model_validator(mode="after")
    def check_shape(self) -> "HardFamilyParams":
        if self.s > self.n:
            raise ValueError(f"set size {self.s} exceeds n={self.n}")
        if self.thresholds is not None:
            wanted = self.atom_count()
            if len(self.thresholds) != wanted:
                raise ValueError(f"expected {wanted} thresholds, got {len(self.thresholds)}")
            for t in self.thresholds:
                if not 1 <= t <= self.value_cap:
                    raise ValueError(f"threshold {t} outside [1, {self.value_cap}]")
        return self

    def atom_count(self) -> int:
        return self.count

    def cross_fraction(self) -> float:
        """Largest share of an atom's value another entry can deliver."""
        return self.b / self.s

    def violations(self) -> List[str]:
        out = []
        if self.value_cap < 1:
            out.append(f"H = {self.value_cap} < 1")
        bound = self.value_cap * self.cross_fraction()
        if not bound < 0.5:
            out.append(f"H * {self._fraction_label()} = {bound:.6g} is not below 1/2")
        return out

    def _fraction_label(self) -> str:
        return "b/s"

    @property
    def valid(self) -> bool:
        return not self.violations()

    @staticmethod
    def asymptotic_defaults(n: int) -> Dict[str, float]:
        """The asymptotic choices s = sqrt(n), b = n^(1/4), N = 2^(n^(1/4)), H = n^(1/4) / 3."""
        quarter = n**0.25
        return {"n": n, "s": math.sqrt(n), "b": quarter, "N": 2**quarter, "H": quarter / 3}


class XOSFamilyParams(HardFamilyParams):
    """
    Parameters of the XOS hard family: ``count`` basic sets grouped into ``collections``
    collections of ``collection_size`` sets, any two collections sharing at most
    ``collection_overlap`` sets.
    """

    collections: int = Field(ge=1)
    collection_size: int = Field(ge=1)
    collection_overlap: int = Field(ge=0)

    @model_validator(mode="after")
    def check_collections(self) -> "XOSFamilyParams":
        if self.collection_size > self.count:
            raise ValueError(
                f"collection size {self.collection_size} exceeds the {self.count} basic sets"
            )
        return self

    def atom_count(self) -> int:
        return self.collections

    def cross_fraction(self) -> float:
        shared = self.collection_overlap / self.collection_size
        return shared + (1 - shared) * self.b / self.s

    def _fraction_label(self) -> str:
        return "(b'/m + (1 - b'/m) b/s)"


class HardInstance(BaseModel):
    """A hard-family distribution together with its designated menu."""

    model_config = ConfigDict(frozen=True)

    params: HardFamilyParams
    sets: BasicSetSystem
    collections: Optional[BasicSetSystem] = None
    thresholds: Tuple[float, ...]
    distribution: TypeDistribution
    menu: Menu

    @property
    def instance(self) -> Instance:
        return Instance(n=self.params.n, distribution=self.distribution, menu=self.menu)

    def expected_revenue(self) -> float:
        """(1 / 2N) sum of t_i, the revenue when every atom buys its own entry once."""
        return sum(self.thresholds) / (2 * len(self.thresholds))

    def cross_utility_bounds(self) -> np.ndarray:
        """
        bounds[i, j] = t_i * fraction - t_j / 2, an upper bound on atom i's utility from
        entry j; negative off the diagonal on valid parameters.
        """
        t = np.asarray(self.thresholds)
        bounds = np.outer(t, np.ones_like(t)) * self.params.cross_fraction() - t[None, :] / 2
        np.fill_diagonal(bounds, t / 2)
        return bounds


def _draw_thresholds(params: HardFamilyParams, atoms: int, rng: np.random.Generator):
    if params.thresholds is not None:
        return tuple(float(t) for t in params.thresholds)
    return truncated_geometric(params.value_cap, size=atoms, rng=rng)


def _refuse_invalid(params: HardFamilyParams) -> None:
    problems = params.violations()
    if problems:
        raise InstanceValidationError("; ".join(problems), path="params")


def gen_hard_unit_demand(
    params: HardFamilyParams, sets: Optional[BasicSetSystem] = None
) -> HardInstance:
    """
    Atom i values any item of S_i at t_i and nothing else, with probability 1/N. Entry i of
    the menu gives one uniform item of S_i for t_i / 2.

    Raises:
        InstanceValidationError: If the parameters violate H >= 1 or H b/s < 1/2.
    """
    _refuse_invalid(params)
    set_seq, value_seq = np.random.SeedSequence(params.seed).spawn(2)
    if sets is None:
        sets = sample_basic_sets(
            params.n,
            params.s,
            params.b,
            params.count,
            retry_budget=params.retry_budget,
            rng=np.random.default_rng(set_seq),
        )
    thresholds = _draw_thresholds(params, sets.count, np.random.default_rng(value_seq))

    atoms, entries = [], []
    for mask, t in zip(sets.sets, thresholds):
        members = members_of(mask)
        values = [t if i in members else 0.0 for i in range(params.n)]
        atoms.append(Atom(prob=1.0 / sets.count, valuation=Valuation.from_unit_demand(values)))
        entries.append(
            Lottery(allocation=tuple((1 << i, 1.0 / len(members)) for i in members), price=t / 2)
        )
    logger.debug(f"Unit-demand hard family: {sets.count} atoms over {params.n} items")
    return HardInstance(
        params=params,
        sets=sets,
        thresholds=thresholds,
        distribution=TypeDistribution(atoms=tuple(atoms)),
        menu=Menu(entries=tuple(entries), semantics=Semantics.BUY_MANY),
    )


def gen_hard_xos(params: XOSFamilyParams, sets: Optional[BasicSetSystem] = None) -> HardInstance:
    """
    Atom i is the XOS valuation v(S) = (t_i / s) max over S' in C_i of |S & S'|, one clause
    per basic set of its collection C_i. Entry i allocates each S' in C_i with probability
    1/m for t_i / 2. Collections are sampled as set systems over the basic-set indices.

    Raises:
        InstanceValidationError: If the collection-level validity inequality fails.
    """
    _refuse_invalid(params)
    set_seq, collection_seq, value_seq = np.random.SeedSequence(params.seed).spawn(3)
    if sets is None:
        sets = sample_basic_sets(
            params.n,
            params.s,
            params.b,
            params.count,
            retry_budget=params.retry_budget,
            rng=np.random.default_rng(set_seq),
        )
    collections = sample_basic_sets(
        sets.count,
        params.collection_size,
        params.collection_overlap,
        params.collections,
        retry_budget=params.retry_budget,
        rng=np.random.default_rng(collection_seq),
    )
    thresholds = _draw_thresholds(params, collections.count, np.random.default_rng(value_seq))

    atoms, entries = [], []
    for collection, t in zip(collections.sets, thresholds):
        chosen = [sets.sets[j] for j in members_of(collection)]
        clauses = [
            [t / params.s if (mask >> i) & 1 else 0.0 for i in range(params.n)] for mask in chosen
        ]
        atoms.append(Atom(prob=1.0 / collections.count, valuation=Valuation.from_xos(clauses)))
        entries.append(
            Lottery(allocation=tuple((mask, 1.0 / len(chosen)) for mask in chosen), price=t / 2)
        )
    logger.debug(
        f"XOS hard family: {collections.count} collections of {params.collection_size} sets"
    )
    return HardInstance(
        params=params,
        sets=sets,
        collections=collections,
        thresholds=thresholds,
        distribution=TypeDistribution(atoms=tuple(atoms)),
        menu=Menu(entries=tuple(entries), semantics=Semantics.BUY_MANY),
    )


def desk_unit_demand_params(seed: int = 0) -> HardFamilyParams:
    """
    Four disjoint triples of 12 items, H = 8.

    With b = 0 no entry gives an atom any value outside its own set. Overlapping sets are
    covered by :func:`desk_overlapping_unit_demand_params`.
    """
    return HardFamilyParams(n=12, s=3, b=0, count=4, value_cap=8, seed=seed)


def desk_overlapping_unit_demand_params(seed: int = 0) -> HardFamilyParams:
    """
    Four 4-sets of 10 items meeting pairwise in at most one item.

    Validity needs H b/s < 1/2, so with b = 1 and s = 4 the cap is H < 2. The truncated
    geometric needs H >= 2, so the thresholds are fixed in [1, 1.75].
    """
    return HardFamilyParams(
        n=10,
        s=4,
        b=1,
        count=4,
        value_cap=1.75,
        seed=seed,
        thresholds=(1.0, 1.25, 1.5, 1.75),
    )


def desk_xos_params(seed: int = 0) -> XOSFamilyParams:
    """Four disjoint triples of 12 items grouped into two disjoint pairs, H = 8."""
    return XOSFamilyParams(
        n=12,
        s=3,
        b=0,
        count=4,
        value_cap=8,
        seed=seed,
        collections=2,
        collection_size=2,
        collection_overlap=0,
    )


@register_generator
class HardUnitDemandGenerator(BaseGenerator):
    kind = "hard-unitdemand"

    def generate(self, seed: int = 0, **params: Any) -> Dict[str, Any]:
        settings = desk_unit_demand_params(seed).model_dump()
        settings.update({k: v for k, v in params.items() if v is not None})
        return instance_document(gen_hard_unit_demand(HardFamilyParams(**settings)).instance)


@register_generator
class HardXOSGenerator(BaseGenerator):
    kind = "hard-xos"

    def generate(self, seed: int = 0, **params: Any) -> Dict[str, Any]:
        settings = desk_xos_params(seed).model_dump()
        settings.update({k: v for k, v in params.items() if v is not None})
        return instance_document(gen_hard_xos(XOSFamilyParams(**settings)).instance)
