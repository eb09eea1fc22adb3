from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from buymanylab.io.containers.base import DataContainer
from buymanylab.models.lottery import Lottery
from buymanylab.models.menu import Menu, Semantics

# Coordinates below this are LP or rounding residue and are treated as zero
RESIDUE = 1e-12


@dataclass
class MarginalMenu(DataContainer[np.ndarray]):
    """
    A menu in marginal form: row r allocates coordinate c with probability ``data[r, c]``.

    Coordinates are items (unit-demand view) or subsets (meta-item view). In the meta-item
    view the column of the empty set is the slack: it is never checked or rounded and is
    recomputed as one minus the other coordinates.

    Attributes:
        data (np.ndarray): entries x coordinates allocation matrix.
        prices (np.ndarray): Price per row.
        coordinates (Tuple[int, ...]): Item-set bitmask allocated by each column.
        origin (np.ndarray): Index of the source menu entry of each row.
        slack_column (Optional[int]): Column holding the leftover mass, if any.
        stage_counts (Dict[str, int]): Row count after each processing stage.
        removed (Dict[str, List[int]]): Origin indices removed by each stage.
    """

    prices: np.ndarray = field(default_factory=lambda: np.zeros(0))
    coordinates: Tuple[int, ...] = ()
    origin: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    slack_column: Optional[int] = None
    stage_counts: Dict[str, int] = field(default_factory=dict)
    removed: Dict[str, List[int]] = field(default_factory=dict)

    @property
    def checked_columns(self) -> List[int]:
        return [c for c in range(len(self.coordinates)) if c != self.slack_column]

    def __len__(self) -> int:
        return len(self.prices)

    @classmethod
    def from_unit_demand(cls, menu: Menu, n: int) -> "MarginalMenu":
        rows = [lottery.marginals(n) for lottery in menu.entries]
        data = np.array(rows) if rows else np.zeros((0, n))
        data = np.where(data > RESIDUE, data, 0.0)
        return cls(
            data=data,
            prices=np.array([lottery.price for lottery in menu.entries]),
            coordinates=tuple(1 << i for i in range(n)),
            origin=np.arange(len(menu.entries)),
        )

    @classmethod
    def from_meta_items(cls, menu: Menu, n: int) -> "MarginalMenu":
        size = 1 << n
        data = np.zeros((len(menu.entries), size))
        for r, lottery in enumerate(menu.entries):
            for items, prob in lottery.allocation:
                data[r, items] += prob
        data = np.where(data > RESIDUE, data, 0.0)
        return cls(
            data=data,
            prices=np.array([lottery.price for lottery in menu.entries]),
            coordinates=tuple(range(size)),
            origin=np.arange(len(menu.entries)),
            slack_column=0,
        )

    def to_menu(self, semantics: Semantics = Semantics.BUY_MANY) -> Menu:
        entries = []
        for row, price in zip(self.data, self.prices):
            pairs = [
                (self.coordinates[c], float(row[c]))
                for c in self.checked_columns
                if row[c] > 0
            ]
            slack = 1.0 - sum(p for _, p in pairs)
            if slack > RESIDUE:
                pairs.append((0, slack))
            entries.append(Lottery(allocation=tuple(pairs), price=float(price)))
        return Menu(entries=tuple(entries), semantics=semantics)

    def record(self, stage: str) -> None:
        self.stage_counts[stage] = len(self)
