from .itemset import ItemSet
from .valuation import Valuation, ValuationKind
from .lottery import Lottery
from .menu import Menu, Semantics
from .distribution import Atom, TypeDistribution
from .marginal import MarginalAllocation
from .outcome import STOP, BestResponse, Outcome, Policy

__all__ = [
    "ItemSet",
    "Valuation",
    "ValuationKind",
    "Lottery",
    "Menu",
    "Semantics",
    "Atom",
    "TypeDistribution",
    "MarginalAllocation",
    "STOP",
    "BestResponse",
    "Outcome",
    "Policy",
]
