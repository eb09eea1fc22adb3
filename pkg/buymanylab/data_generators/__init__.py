from .basegenerators import BaseGenerator, Registry, generator_registry, register_generator
from .setsystems import BasicSetSystem, BasicSetsGenerator, sample_basic_sets
from .counterexample import CounterexampleGenerator, CounterexampleInstance, gen_counterexample
from .hardfamilies import (
    HardFamilyParams,
    HardInstance,
    HardUnitDemandGenerator,
    HardXOSGenerator,
    XOSFamilyParams,
    desk_overlapping_unit_demand_params,
    desk_unit_demand_params,
    desk_xos_params,
    gen_hard_unit_demand,
    gen_hard_xos,
    truncated_geometric,
    truncated_geometric_mean,
    truncated_geometric_pmf,
)
from .randominstances import (
    RandomInstanceGenerator,
    random_distribution,
    random_instance,
    random_lottery,
    random_menu,
    random_valuation,
)

__all__ = [
    "BaseGenerator",
    "Registry",
    "generator_registry",
    "register_generator",
    "BasicSetSystem",
    "BasicSetsGenerator",
    "sample_basic_sets",
    "CounterexampleGenerator",
    "CounterexampleInstance",
    "gen_counterexample",
    "HardFamilyParams",
    "HardInstance",
    "HardUnitDemandGenerator",
    "HardXOSGenerator",
    "XOSFamilyParams",
    "desk_overlapping_unit_demand_params",
    "desk_unit_demand_params",
    "desk_xos_params",
    "gen_hard_unit_demand",
    "gen_hard_xos",
    "truncated_geometric",
    "truncated_geometric_mean",
    "truncated_geometric_pmf",
    "RandomInstanceGenerator",
    "random_distribution",
    "random_instance",
    "random_lottery",
    "random_menu",
    "random_valuation",
]
