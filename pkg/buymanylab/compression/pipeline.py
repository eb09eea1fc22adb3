import logging
from functools import reduce
from typing import List

from buymanylab.compression.components import BaseComponent, DropSmall, GridRound
from buymanylab.compression.params import CompressionParams
from buymanylab.io.containers.marginalmenu import MarginalMenu

logger = logging.getLogger(__name__)


class CompressionPipeline:
    """
    The two-stage pipeline: drop small coordinates, then round down to the grid.

    Example:
        >>> pipeline = CompressionPipeline(CompressionParams(epsilon=0.25, items=2))
        >>> compressed = pipeline(MarginalMenu.from_unit_demand(menu, 2))
    """

    def __init__(self, params: CompressionParams):
        self.params = params
        self.stages: List[BaseComponent] = [DropSmall(params), GridRound(params)]

    def __repr__(self) -> str:
        return "[" + ", ".join(f'"{type(s).__name__}"' for s in self.stages) + "]"

    def __call__(self, data: MarginalMenu) -> MarginalMenu:
        data.record("input")
        logger.debug(f"Compressing {len(data)} entries with delta={self.params.delta:g}")
        return reduce(lambda d, stage: stage(d), self.stages, data)
