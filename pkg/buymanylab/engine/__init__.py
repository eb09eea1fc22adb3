from .buyer import (
    best_response,
    buy_many_best_response,
    buy_one_best_response,
    evaluate_policy,
    reachable_states,
)
from .dominance import dominates

__all__ = [
    "best_response",
    "buy_many_best_response",
    "buy_one_best_response",
    "evaluate_policy",
    "reachable_states",
    "dominates",
]
