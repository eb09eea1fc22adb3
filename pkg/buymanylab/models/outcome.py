from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from buymanylab.models.lottery import Allocation, Lottery, canonical_allocation
from buymanylab.models.valuation import Valuation
from buymanylab.utils.setfunctions import members_of

STOP = -1
# Outcomes are computed by division chains, so they get a looser sum check than lotteries
OUTCOME_TOLERANCE = 1e-6


class Policy(BaseModel):
    """
    A stationary buying strategy: one action per held set.

    ``actions[S]`` is ``STOP`` (-1) or the index of the menu entry bought while holding S.
    """

    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=0)
    actions: Tuple[int, ...]

    @model_validator(mode="after")
    def check_length(self) -> "Policy":
        if len(self.actions) != 1 << self.n:
            raise ValueError(f"policy needs {1 << self.n} actions, got {len(self.actions)}")
        if any(a < STOP for a in self.actions):
            raise ValueError("actions must be STOP (-1) or an entry index")
        return self

    @classmethod
    def stop_everywhere(cls, n: int) -> "Policy":
        return cls(n=n, actions=(STOP,) * (1 << n))

    @classmethod
    def from_mapping(cls, n: int, mapping: Dict[int, int]) -> "Policy":
        actions = [STOP] * (1 << n)
        for state, action in mapping.items():
            actions[state] = action
        return cls(n=n, actions=tuple(actions))

    def action(self, state: int) -> int:
        return self.actions[state]

    def buying_states(self) -> Dict[int, int]:
        return {s: a for s, a in enumerate(self.actions) if a != STOP}

    def describe(self) -> List[dict]:
        """JSON-friendly list of the non-stop actions."""
        return [
            {"held": members_of(s), "entry": a} for s, a in self.buying_states().items()
        ]


class Outcome(BaseModel):
    """The expected result of a buying strategy: final allocation and expected payment."""

    model_config = ConfigDict(frozen=True)

    allocation: Allocation
    payment: float

    @field_validator("allocation", mode="before")
    @classmethod
    def canonicalise(cls, value):
        if isinstance(value, dict):
            value = value.items()
        return canonical_allocation(value)

    @model_validator(mode="after")
    def check_total(self) -> "Outcome":
        total = sum(p for _, p in self.allocation)
        if abs(total - 1.0) > OUTCOME_TOLERANCE:
            raise ValueError(f"outcome probabilities sum to {total}, expected 1")
        return self

    @classmethod
    def null(cls) -> "Outcome":
        return cls(allocation=((0, 1.0),), payment=0.0)

    @classmethod
    def of_lottery(cls, lottery: Lottery) -> "Outcome":
        return cls(allocation=lottery.allocation, payment=lottery.price)

    def value(self, v: Valuation) -> float:
        return float(sum(p * v.value(s) for s, p in self.allocation))

    def utility(self, v: Valuation) -> float:
        return self.value(v) - self.payment

    def as_lottery(self) -> Lottery:
        total = sum(p for _, p in self.allocation)
        return Lottery(
            allocation=tuple((s, p / total) for s, p in self.allocation),
            price=max(self.payment, 0.0),
        )

    def describe(self) -> dict:
        return {
            "allocation": [{"set": members_of(s), "prob": p} for s, p in self.allocation],
            "payment": self.payment,
        }


class BestResponse(BaseModel):
    """
    The buyer's optimal choice against a menu.

    ``entry`` is set for buy-one responses (None means the null lottery); ``policy`` is set
    for buy-many responses.
    """

    model_config = ConfigDict(frozen=True)

    utility: float
    outcome: Outcome
    entry: Optional[int] = None
    policy: Optional[Policy] = None

    @property
    def payment(self) -> float:
        return self.outcome.payment

    @property
    def first_entry(self) -> int:
        """The entry bought first, or STOP when nothing is bought."""
        if self.policy is not None:
            return self.policy.action(0)
        return STOP if self.entry is None else self.entry
