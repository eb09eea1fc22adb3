import logging
from abc import ABC, abstractmethod

import numpy as np

from buymanylab.compression.params import CompressionParams
from buymanylab.io.containers.marginalmenu import MarginalMenu

logger = logging.getLogger(__name__)

# Slack on the floor so values already on the grid are not pushed down by float error
GRID_SLACK = 1e-9


def round_to_grid(values: np.ndarray, step: float, delta: float) -> np.ndarray:
    """
    Floors values to multiples of step. A value of at least delta is never floored
    below delta, so DropSmall keeps every row that GridRound produced.
    """
    quotient = values / step
    slack = np.maximum(GRID_SLACK, 8 * np.finfo(float).eps * quotient)
    floored = np.floor(quotient + slack) * step
    return np.where((values >= delta) & (floored < delta), delta, floored)


class BaseComponent(ABC):
    """
    Abstract base class for the stages of a compression pipeline.

    Subclasses must implement the __call__ method and return a new container.
    """

    @abstractmethod
    def __call__(self, data: MarginalMenu) -> MarginalMenu:
        """
        Process the input menu and return the processed menu.

        Args:
            data (MarginalMenu): The input menu in marginal form.

        Returns:
            MarginalMenu: The processed menu.
        """
        pass


class DropSmall(BaseComponent):
    """
    Removes every entry with some checked coordinate strictly inside (0, delta) and
    discounts the surviving prices by the first stage factor.
    """

    def __init__(self, params: CompressionParams):
        self.params = params

    def __call__(self, data: MarginalMenu) -> MarginalMenu:
        cols = data.checked_columns
        block = data.data[:, cols] if len(data) else np.zeros((0, len(cols)))
        small = (block > 0) & (block < self.params.delta)
        keep = ~small.any(axis=1)
        dropped = int(len(data) - keep.sum())
        logger.debug(f"DropSmall removed {dropped} of {len(data)} entries")

        result = MarginalMenu(
            data=data.data[keep],
            prices=data.prices[keep] * self.params.small_discount,
            coordinates=data.coordinates,
            origin=data.origin[keep],
            slack_column=data.slack_column,
            stage_counts=dict(data.stage_counts),
            removed={**data.removed, "drop_small": data.origin[~keep].tolist()},
        )
        result.record("drop_small")
        return result


class GridRound(BaseComponent):
    """
    Rounds every checked coordinate down to a multiple of the grid step (never below delta
    for a coordinate that was at least delta), discounts prices by the second stage factor
    and collapses identical rows to the cheapest one.
    """

    def __init__(self, params: CompressionParams):
        self.params = params

    def __call__(self, data: MarginalMenu) -> MarginalMenu:
        step = self.params.grid_step
        rounded = data.data.copy()
        cols = data.checked_columns
        if len(data):
            rounded[:, cols] = round_to_grid(data.data[:, cols], step, self.params.delta)
            if data.slack_column is not None:
                rounded[:, data.slack_column] = np.clip(
                    1.0 - rounded[:, cols].sum(axis=1), 0.0, 1.0
                )
        prices = data.prices * self.params.grid_discount

        cheapest = {}
        for r in range(len(data)):
            key = tuple(rounded[r, cols].tolist())
            if key not in cheapest or prices[r] < prices[cheapest[key]]:
                cheapest[key] = r
        rows = sorted(cheapest.values())
        logger.debug(f"GridRound collapsed {len(data) - len(rows)} duplicate entries")

        result = MarginalMenu(
            data=rounded[rows] if rows else rounded[:0],
            prices=prices[rows] if rows else prices[:0],
            coordinates=data.coordinates,
            origin=data.origin[rows] if rows else data.origin[:0],
            slack_column=data.slack_column,
            stage_counts=dict(data.stage_counts),
            removed=dict(data.removed),
        )
        result.record("grid_round")
        return result
