from .revenue import (
    AlphaDistribution,
    AlphaKind,
    REVENUE_COLUMNS,
    item_pricing_choice,
    item_pricing_revenue,
    q_vector,
    revenue,
    revenue_table,
    scaled_pricing_bound_check,
    scaled_pricing_revenue,
)
from .optimizers import (
    ItemPricing,
    ItemPricingEvaluator,
    PostedPrice,
    best_bundle_price,
    best_item_pricing,
    best_posted_price,
    best_single_item_price,
)

__all__ = [
    "AlphaDistribution",
    "AlphaKind",
    "REVENUE_COLUMNS",
    "item_pricing_choice",
    "item_pricing_revenue",
    "q_vector",
    "revenue",
    "revenue_table",
    "scaled_pricing_bound_check",
    "scaled_pricing_revenue",
    "ItemPricing",
    "ItemPricingEvaluator",
    "PostedPrice",
    "best_bundle_price",
    "best_item_pricing",
    "best_posted_price",
    "best_single_item_price",
]
