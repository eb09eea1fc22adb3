from typing import Iterable, List, Optional

from buymanylab.utils.setfunctions import mask_of, members_of, popcount


class ItemSet(int):
    """
    A subset of the items {0, ..., n-1}, stored as a bitmask.

    ItemSet is an ``int`` so it can index valuation tables directly and be used as a
    dictionary key; the set operations below keep the set semantics explicit.

    Example:
        >>> s = ItemSet.from_members([0, 2])
        >>> s.members
        [0, 2]
        >>> s.issubset(ItemSet.from_members([0, 1, 2]))
        True
    """

    def __new__(cls, mask: int = 0):
        if mask < 0:
            raise ValueError("ItemSet mask must be nonnegative")
        return super().__new__(cls, mask)

    @classmethod
    def from_members(cls, members: Iterable[int], n: Optional[int] = None) -> "ItemSet":
        members = list(members)
        if n is not None:
            for i in members:
                if not 0 <= i < n:
                    raise ValueError(f"Item index {i} out of range for n={n}")
        return cls(mask_of(members))

    @classmethod
    def empty(cls) -> "ItemSet":
        return cls(0)

    @classmethod
    def full(cls, n: int) -> "ItemSet":
        return cls((1 << n) - 1)

    @property
    def members(self) -> List[int]:
        return members_of(int(self))

    @property
    def size(self) -> int:
        return popcount(int(self))

    def fits(self, n: int) -> bool:
        return int(self) >> n == 0

    def issubset(self, other: int) -> bool:
        return int(self) & ~int(other) == 0

    def issuperset(self, other: int) -> bool:
        return int(other) & ~int(self) == 0

    def union(self, other: int) -> "ItemSet":
        return ItemSet(int(self) | int(other))

    def intersection(self, other: int) -> "ItemSet":
        return ItemSet(int(self) & int(other))

    def __contains__(self, item: int) -> bool:
        return item >= 0 and bool((int(self) >> item) & 1)

    def __repr__(self) -> str:
        return f"ItemSet({{{', '.join(map(str, self.members))}}})"
