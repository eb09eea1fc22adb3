from .betamenu import (
    P_STAR,
    WORST_CASE_PAYMENT,
    X0,
    Y0,
    BetaICReport,
    BetaOutcome,
    BetaPartitionReport,
    BetaRevenueReport,
    BetaVerificationReport,
    Region,
    beta_ic_check,
    beta_menu,
    beta_outcome,
    beta_partition_check,
    beta_revenue,
    beta_revenue_report,
    best_beta_bundle_price,
    bundle_sale_probability,
    classify,
    region_masks,
    verify_beta_buy_many,
)

__all__ = [
    "P_STAR",
    "WORST_CASE_PAYMENT",
    "X0",
    "Y0",
    "BetaICReport",
    "BetaOutcome",
    "BetaPartitionReport",
    "BetaRevenueReport",
    "BetaVerificationReport",
    "Region",
    "beta_ic_check",
    "beta_menu",
    "beta_outcome",
    "beta_partition_check",
    "beta_revenue",
    "beta_revenue_report",
    "best_beta_bundle_price",
    "bundle_sale_probability",
    "classify",
    "region_masks",
    "verify_beta_buy_many",
]
