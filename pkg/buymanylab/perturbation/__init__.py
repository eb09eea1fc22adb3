from .spec import (
    Coupling,
    PerturbationMode,
    PerturbationSpec,
    discount_menu,
    epsilon_prime,
    perturb,
    sandwich_holds,
)
from .continuity import (
    ATOM_COLUMNS,
    AtomRecord,
    ContinuityReport,
    classify_a,
    continuity_bound_ratio,
    revenue_ratios,
    run_continuity_experiment,
)

__all__ = [
    "Coupling",
    "PerturbationMode",
    "PerturbationSpec",
    "discount_menu",
    "epsilon_prime",
    "perturb",
    "sandwich_holds",
    "ATOM_COLUMNS",
    "AtomRecord",
    "ContinuityReport",
    "classify_a",
    "continuity_bound_ratio",
    "revenue_ratios",
    "run_continuity_experiment",
]
