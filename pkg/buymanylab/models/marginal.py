from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from buymanylab.models.lottery import Lottery, PROBABILITY_TOLERANCE


class MarginalAllocation(BaseModel):
    """Unit-demand view of a lottery: item i is allocated with probability ``probs[i]``."""

    model_config = ConfigDict(frozen=True)

    probs: Tuple[float, ...]

    @model_validator(mode="after")
    def check_probs(self) -> "MarginalAllocation":
        if any(x < 0 for x in self.probs):
            raise ValueError("marginal probabilities must be nonnegative")
        if sum(self.probs) > 1.0 + PROBABILITY_TOLERANCE:
            raise ValueError(f"marginal probabilities sum to {sum(self.probs)} > 1")
        return self

    @property
    def n(self) -> int:
        return len(self.probs)

    def as_array(self) -> np.ndarray:
        return np.array(self.probs)

    def to_lottery(self, price: float) -> Lottery:
        return Lottery.from_marginals(self.probs, price)

    @classmethod
    def from_lottery(cls, lottery: Lottery, n: int) -> "MarginalAllocation":
        if not lottery.is_unit_demand_form():
            raise ValueError("lottery support is not singletons plus the empty set")
        return cls(probs=tuple(float(x) for x in lottery.marginals(n)))
