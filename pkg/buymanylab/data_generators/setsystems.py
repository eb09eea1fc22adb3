import logging
from itertools import combinations
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from buymanylab.data_generators.basegenerators import BaseGenerator, register_generator
from buymanylab.errors import SetSystemSamplingError
from buymanylab.utils.setfunctions import mask_of, members_of, popcount

logger = logging.getLogger(__name__)

DEFAULT_RETRY_BUDGET = 100_000


class BasicSetSystem(BaseModel):
    """
    N distinct subsets of [n], each of size s, pairwise intersecting in at most b items.

    Sets are stored as bitmasks.
    """

    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1)
    s: int = Field(ge=1)
    b: int = Field(ge=0)
    sets: Tuple[int, ...] = Field(min_length=1)

    @model_validator(mode="after")
    def check_sets(self) -> "BasicSetSystem":
        if len(set(self.sets)) != len(self.sets):
            raise ValueError("basic sets must be distinct")
        for mask in self.sets:
            if mask >> self.n:
                raise ValueError(f"set {members_of(mask)} uses items outside 0..{self.n - 1}")
            if popcount(mask) != self.s:
                raise ValueError(f"set {members_of(mask)} does not have size {self.s}")
        for a, c in combinations(self.sets, 2):
            if popcount(a & c) > self.b:
                raise ValueError(
                    f"sets {members_of(a)} and {members_of(c)} share more than {self.b} items"
                )
        return self

    @property
    def count(self) -> int:
        return len(self.sets)

    def members(self) -> List[List[int]]:
        return [members_of(mask) for mask in self.sets]

    def max_intersection(self) -> int:
        return max((popcount(a & c) for a, c in combinations(self.sets, 2)), default=0)

    def document(self) -> Dict[str, Any]:
        return {"n": self.n, "s": self.s, "b": self.b, "N": self.count, "sets": self.members()}


def sample_basic_sets(
    n: int,
    s: int,
    b: int,
    count: int,
    seed: Optional[int] = 0,
    retry_budget: int = DEFAULT_RETRY_BUDGET,
    rng: Optional[np.random.Generator] = None,
) -> BasicSetSystem:
    """
    Rejection-sample ``count`` size-``s`` subsets of [n] with pairwise intersections <= ``b``.

    Candidates are drawn one at a time and kept when they are new and compatible with every
    set kept so far.

    Raises:
        ValueError: If s > n or count < 1.
        SetSystemSamplingError: If ``retry_budget`` draws are not enough.
    """
    if not 1 <= s <= n:
        raise ValueError(f"set size s={s} must lie in 1..{n}")
    if count < 1:
        raise ValueError("count must be at least 1")
    rng = rng if rng is not None else np.random.default_rng(seed)

    kept: List[int] = []
    attempts = 0
    while len(kept) < count:
        if attempts >= retry_budget:
            raise SetSystemSamplingError(attempts=attempts, found=len(kept), wanted=count)
        attempts += 1
        candidate = mask_of(int(i) for i in rng.choice(n, size=s, replace=False))
        if candidate in kept:
            continue
        if all(popcount(candidate & other) <= b for other in kept):
            kept.append(candidate)

    logger.debug(f"Sampled {count} basic sets of size {s} from {n} items in {attempts} draws")
    return BasicSetSystem(n=n, s=s, b=b, sets=tuple(kept))


@register_generator
class BasicSetsGenerator(BaseGenerator):
    kind = "basic-sets"

    def generate(
        self,
        seed: int = 0,
        n: int = 16,
        s: int = 4,
        b: int = 2,
        count: int = 8,
        retry_budget: int = DEFAULT_RETRY_BUDGET,
        **params: Any,
    ) -> Dict[str, Any]:
        return sample_basic_sets(n, s, b, count, seed, retry_budget).document()
