import math
from typing import Dict, Iterable, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from buymanylab.models.valuation import Valuation

# Probabilities must sum to one within this slack
PROBABILITY_TOLERANCE = 1e-9
# Probabilities at or below this magnitude are treated as rounding noise
NOISE_FLOOR = 1e-15

Allocation = Tuple[Tuple[int, float], ...]


def canonical_allocation(pairs: Iterable[Tuple[int, float]]) -> Allocation:
    """Merge repeated sets, drop zero mass and sort by bitmask."""
    merged: Dict[int, float] = {}
    for items, prob in pairs:
        items = int(items)
        prob = float(prob)
        if items < 0:
            raise ValueError(f"item set mask must be nonnegative, got {items}")
        if not math.isfinite(prob):
            raise ValueError(f"probability must be finite, got {prob}")
        merged[items] = merged.get(items, 0.0) + prob
    # tiny negatives are rounding noise; large ones are kept so validation can reject them
    return tuple(
        (s, p)
        for s, p in sorted(merged.items())
        if p > NOISE_FLOOR or p < -PROBABILITY_TOLERANCE
    )


class Lottery(BaseModel):
    """
    A priced distribution over item sets.

    Attributes:
        allocation: (item set bitmask, probability) pairs; canonicalised on construction.
        price: Nonnegative price of the lottery.
    """

    model_config = ConfigDict(frozen=True)

    allocation: Allocation
    price: float = Field(ge=0)

    @field_validator("allocation", mode="before")
    @classmethod
    def canonicalise(cls, value):
        if isinstance(value, dict):
            value = value.items()
        return canonical_allocation(value)

    @model_validator(mode="after")
    def check_distribution(self) -> "Lottery":
        if not math.isfinite(self.price):
            raise ValueError("price must be finite")
        for items, prob in self.allocation:
            if prob < -PROBABILITY_TOLERANCE:
                raise ValueError(f"negative probability {prob} on set {items:#b}")
        total = sum(p for _, p in self.allocation)
        if abs(total - 1.0) > PROBABILITY_TOLERANCE:
            raise ValueError(f"allocation probabilities sum to {total}, expected 1")
        return self

    @classmethod
    def null(cls) -> "Lottery":
        return cls(allocation=((0, 1.0),), price=0.0)

    @classmethod
    def deterministic(cls, items: int, price: float) -> "Lottery":
        return cls(allocation=((int(items), 1.0),), price=price)

    @classmethod
    def from_marginals(cls, marginals: Sequence[float], price: float) -> "Lottery":
        """Build a unit-demand lottery: item i w.p. marginals[i], nothing with the slack."""
        pairs = [(1 << i, float(x)) for i, x in enumerate(marginals) if x > 0]
        slack = 1.0 - sum(p for _, p in pairs)
        if slack < -PROBABILITY_TOLERANCE:
            raise ValueError(f"marginals sum to {1.0 - slack} > 1")
        if slack > 0:
            pairs.append((0, slack))
        return cls(allocation=tuple(pairs), price=price)

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(s for s, _ in self.allocation)

    @property
    def is_deterministic(self) -> bool:
        return len(self.allocation) == 1

    @property
    def is_null(self) -> bool:
        return self.allocation == ((0, 1.0),) and self.price == 0

    def max_item(self) -> int:
        return max((s.bit_length() - 1 for s in self.support), default=-1)

    def value(self, v: Valuation) -> float:
        return float(sum(p * v.value(s) for s, p in self.allocation))

    def utility(self, v: Valuation) -> float:
        return self.value(v) - self.price

    def marginals(self, n: int) -> np.ndarray:
        """Pr[i in S] for every item i."""
        out = np.zeros(n)
        for items, prob in self.allocation:
            for i in range(n):
                if (items >> i) & 1:
                    out[i] += prob
        return out

    def self_loop_probability(self, held: int) -> float:
        """Probability that a purchase adds nothing to the held set."""
        return float(sum(p for s, p in self.allocation if s & ~held == 0))

    def is_unit_demand_form(self) -> bool:
        """Support is singletons plus possibly the empty set."""
        return all(s & (s - 1) == 0 for s in self.support)

    def with_price(self, price: float) -> "Lottery":
        return Lottery(allocation=self.allocation, price=price)

    def discounted(self, factor: float) -> "Lottery":
        return self.with_price(self.price * factor)
