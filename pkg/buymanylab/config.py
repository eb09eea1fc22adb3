from dataclasses import dataclass, replace


@dataclass(frozen=True)
class LabConfig:
    """
    Tolerances and capacity limits shared by every operation in the lab.

    Attributes:
        tolerance (float): Absolute tolerance for utility, price and probability comparisons.
        flow_tolerance (float): Slack accepted on the dominance max-flow value.
        max_table_items (int): Largest n for table valuations and item-pricing expansion.
        max_dp_items (int): Largest n for the buy-many dynamic program.
        max_policy_items (int): Largest n for exhaustive policy enumeration.
        policy_budget (int): Maximum number of policies enumerated before giving up.
        lp_max_atoms (int): Largest number of atoms accepted by the buy-one LP.
        lp_max_items (int): Largest n accepted by the buy-one LP.
        meta_max_items (int): Largest n for meta-item compression.
        alpha_grid_points (int): Quadrature nodes for scaled item pricing.
    """

    tolerance: float = 1e-9
    flow_tolerance: float = 1e-7
    max_table_items: int = 20
    max_dp_items: int = 12
    max_policy_items: int = 4
    policy_budget: int = 200_000
    lp_max_atoms: int = 64
    lp_max_items: int = 4
    meta_max_items: int = 4
    alpha_grid_points: int = 256

    def __post_init__(self):
        if self.tolerance < 0 or self.flow_tolerance < 0:
            raise ValueError("Tolerances must be nonnegative")
        if self.policy_budget < 1:
            raise ValueError("policy_budget must be positive")
        if self.alpha_grid_points < 2:
            raise ValueError("alpha_grid_points must be at least 2")

    def with_overrides(self, **kwargs) -> "LabConfig":
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})


DEFAULT_CONFIG = LabConfig()
