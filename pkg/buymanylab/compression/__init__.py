from .params import CompressionParams
from .components import BaseComponent, DropSmall, GridRound
from .pipeline import CompressionPipeline
from .compress import (
    CompressionReport,
    CompressionRoute,
    compress,
    drop_small,
    grid_round,
    meta_item_compress,
)

__all__ = [
    "CompressionParams",
    "BaseComponent",
    "DropSmall",
    "GridRound",
    "CompressionPipeline",
    "CompressionReport",
    "CompressionRoute",
    "compress",
    "drop_small",
    "grid_round",
    "meta_item_compress",
]
