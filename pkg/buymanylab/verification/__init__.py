from .buymany import (
    ClosureEntry,
    ClosureMenu,
    VerificationResult,
    closure,
    enumerate_policies,
    expand_item_pricing,
    valuation_level_check,
    valuation_level_mismatches,
    verify_buy_many,
)

__all__ = [
    "ClosureEntry",
    "ClosureMenu",
    "VerificationResult",
    "closure",
    "enumerate_policies",
    "expand_item_pricing",
    "valuation_level_check",
    "valuation_level_mismatches",
    "verify_buy_many",
]
