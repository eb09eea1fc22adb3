import math
from enum import Enum
from functools import lru_cache
from typing import Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from buymanylab.utils.setfunctions import (
    additive_table,
    members_of,
    monotonicity_violation,
    unit_demand_table,
)

TABLE_ITEM_LIMIT = 20
# Comparison slack for the monotonicity check on table valuations
MONOTONE_TOLERANCE = 1e-9


class ValuationKind(str, Enum):
    TABLE = "table"
    ADDITIVE = "additive"
    UNIT_DEMAND = "unitdemand"
    XOS = "xos"


ValuationValues = Union[Tuple[Tuple[float, ...], ...], Tuple[float, ...]]


@lru_cache(maxsize=4096)
def _cached_table(kind: ValuationKind, values: ValuationValues) -> np.ndarray:
    if kind is ValuationKind.TABLE:
        table = np.asarray(values, dtype=float)
    elif kind is ValuationKind.ADDITIVE:
        table = additive_table(values)
    elif kind is ValuationKind.UNIT_DEMAND:
        table = unit_demand_table(values)
    else:
        table = np.max(np.vstack([additive_table(c) for c in values]), axis=0)
    table = np.array(table, dtype=float)
    table.setflags(write=False)
    return table


class Valuation(BaseModel):
    """
    A monotone set function over n items with v(empty) = 0.

    The four encodings are:

    - ``table``: 2^n values indexed by bitmask.
    - ``additive``: v(S) = sum of per-item values over S.
    - ``unitdemand``: v(S) = max of per-item values over S.
    - ``xos``: v(S) = max over additive clauses of the clause sum over S.

    Example:
        >>> v = Valuation.from_xos([(1, 0), (0, 2)])
        >>> v.value(0b11)
        2.0
    """

    model_config = ConfigDict(frozen=True)

    kind: ValuationKind
    values: ValuationValues

    @model_validator(mode="after")
    def check_encoding(self) -> "Valuation":
        if len(self.values) == 0:
            raise ValueError("values must not be empty")
        nested = isinstance(self.values[0], tuple)
        if self.kind is ValuationKind.XOS:
            if not nested:
                raise ValueError("xos values must be a list of clauses")
            width = len(self.values[0])
            if width == 0 or any(len(c) != width for c in self.values):
                raise ValueError("xos clauses must all have the same nonzero length")
            flat = [x for c in self.values for x in c]
        else:
            if nested:
                raise ValueError(f"{self.kind.value} values must be a flat list")
            flat = list(self.values)
        for x in flat:
            if not math.isfinite(x) or x < 0:
                raise ValueError(f"values must be finite and nonnegative, got {x}")

        if self.kind is ValuationKind.TABLE:
            size = len(self.values)
            n = size.bit_length() - 1
            if size != 1 << n or n < 1:
                raise ValueError(f"table length {size} is not 2^n for some n >= 1")
            if n > TABLE_ITEM_LIMIT:
                raise ValueError(f"table valuations support at most {TABLE_ITEM_LIMIT} items")
            if abs(self.values[0]) > MONOTONE_TOLERANCE:
                raise ValueError("table valuation must have v(empty) = 0")
            bad = monotonicity_violation(np.asarray(self.values), MONOTONE_TOLERANCE)
            if bad is not None:
                smaller, larger = bad
                raise ValueError(
                    f"valuation is not monotone: v({members_of(smaller)}) = {self.values[smaller]}"
                    f" > v({members_of(larger)}) = {self.values[larger]}"
                )
        return self

    @classmethod
    def from_table(cls, values: Sequence[float]) -> "Valuation":
        return cls(kind=ValuationKind.TABLE, values=tuple(float(x) for x in values))

    @classmethod
    def from_additive(cls, values: Sequence[float]) -> "Valuation":
        return cls(kind=ValuationKind.ADDITIVE, values=tuple(float(x) for x in values))

    @classmethod
    def from_unit_demand(cls, values: Sequence[float]) -> "Valuation":
        return cls(kind=ValuationKind.UNIT_DEMAND, values=tuple(float(x) for x in values))

    @classmethod
    def from_xos(cls, clauses: Sequence[Sequence[float]]) -> "Valuation":
        return cls(
            kind=ValuationKind.XOS,
            values=tuple(tuple(float(x) for x in c) for c in clauses),
        )

    @classmethod
    def zero(cls, n: int) -> "Valuation":
        return cls.from_additive([0.0] * n)

    @property
    def n(self) -> int:
        if self.kind is ValuationKind.TABLE:
            return len(self.values).bit_length() - 1
        if self.kind is ValuationKind.XOS:
            return len(self.values[0])
        return len(self.values)

    def value(self, items: int) -> float:
        """Evaluate v(S) for the bitmask ``items``."""
        items = int(items)
        if items < 0 or items >> self.n:
            raise ValueError(f"Item set {items:#b} has an item outside 0..{self.n - 1}")
        if self.kind is ValuationKind.TABLE:
            return float(self.values[items])
        members = members_of(items)
        if self.kind is ValuationKind.ADDITIVE:
            return float(sum(self.values[i] for i in members))
        if self.kind is ValuationKind.UNIT_DEMAND:
            return float(max((self.values[i] for i in members), default=0.0))
        return float(max(sum(c[i] for i in members) for c in self.values))

    def as_table(self) -> np.ndarray:
        """All 2^n values as a read-only array indexed by bitmask."""
        if self.n > TABLE_ITEM_LIMIT:
            raise ValueError(f"cannot tabulate a valuation over {self.n} items")
        return _cached_table(self.kind, self.values)

    def singleton_values(self) -> np.ndarray:
        return np.array([self.value(1 << i) for i in range(self.n)])

    def grand_value(self) -> float:
        return self.value((1 << self.n) - 1)

    def scaled(self, factor: float) -> "Valuation":
        if factor < 0:
            raise ValueError("scale factor must be nonnegative")
        if self.kind is ValuationKind.XOS:
            return Valuation.from_xos([[x * factor for x in c] for c in self.values])
        return Valuation(kind=self.kind, values=tuple(x * factor for x in self.values))

    def to_table(self) -> "Valuation":
        return Valuation.from_table(self.as_table())

    def is_unit_demand(self, tolerance: float = 1e-9) -> bool:
        if self.kind is ValuationKind.UNIT_DEMAND:
            return True
        table = self.as_table()
        return bool(np.allclose(table, unit_demand_table(self.singleton_values()), rtol=0, atol=tolerance))

    def is_single_parameter(self, tolerance: float = 1e-9) -> bool:
        """True when every nonempty set is worth the grand bundle."""
        table = self.as_table()
        return bool(np.all(np.abs(table[1:] - table[-1]) <= tolerance))
