from enum import Enum
from typing import Dict, Iterator, Tuple

from pydantic import BaseModel, ConfigDict, field_validator

from buymanylab.models.lottery import Lottery


class Semantics(str, Enum):
    BUY_ONE = "buyone"
    BUY_MANY = "buymany"


class Menu(BaseModel):
    """
    A finite list of lotteries offered to the buyer.

    The null lottery is always implicitly available and is not stored. Entries with an
    identical allocation collapse to the cheapest one, keeping the position of the first.
    """

    model_config = ConfigDict(frozen=True)

    entries: Tuple[Lottery, ...] = ()
    semantics: Semantics = Semantics.BUY_ONE

    @field_validator("entries")
    @classmethod
    def dedupe_allocations(cls, entries: Tuple[Lottery, ...]) -> Tuple[Lottery, ...]:
        cheapest: Dict[tuple, Lottery] = {}
        for lottery in entries:
            seen = cheapest.get(lottery.allocation)
            if seen is None or lottery.price < seen.price:
                cheapest[lottery.allocation] = lottery
        # dict preserves first-insertion order
        return tuple(cheapest.values())

    @property
    def size(self) -> int:
        return len(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def lotteries(self) -> Iterator[Lottery]:
        return iter(self.entries)

    def max_item(self) -> int:
        return max((lottery.max_item() for lottery in self.entries), default=-1)

    def check_items(self, n: int) -> None:
        if self.max_item() >= n:
            raise ValueError(f"menu allocates item {self.max_item()} but n={n}")

    def discounted(self, factor: float) -> "Menu":
        return Menu(
            entries=tuple(lottery.discounted(factor) for lottery in self.entries),
            semantics=self.semantics,
        )

    def with_semantics(self, semantics: Semantics) -> "Menu":
        return Menu(entries=self.entries, semantics=semantics)
