import logging
from typing import Dict, Iterable, Mapping, Tuple, Union

import numpy as np
from scipy.optimize import linprog

from buymanylab.config import DEFAULT_CONFIG, LabConfig

logger = logging.getLogger(__name__)

SetDistribution = Union[Mapping[int, float], Iterable[Tuple[int, float]]]


def _as_dict(dist: SetDistribution, floor: float) -> Dict[int, float]:
    items = dist.items() if isinstance(dist, Mapping) else dist
    out: Dict[int, float] = {}
    for s, p in items:
        out[int(s)] = out.get(int(s), 0.0) + float(p)
    return {s: p for s, p in out.items() if p > floor}


def _item_marginals(dist: Dict[int, float]) -> Dict[int, float]:
    out: Dict[int, float] = {}
    for s, p in dist.items():
        i = 0
        while s >> i:
            if (s >> i) & 1:
                out[i] = out.get(i, 0.0) + p
            i += 1
    return out


def dominates(
    p_dist: SetDistribution, q_dist: SetDistribution, config: LabConfig = DEFAULT_CONFIG
) -> bool:
    """
    Decide whether a draw from P can be coupled to contain a draw from Q.

    The coupling exists iff the transportation problem with supplies P, demands Q and an
    edge (S, S') whenever S is a superset of S' carries a flow of 1. Point masses and
    per-item marginals settle most queries before the LP is solved.

    Args:
        p_dist: Distribution over item-set bitmasks (mapping or (set, prob) pairs).
        q_dist: Distribution over item-set bitmasks.
        config (LabConfig): ``flow_tolerance`` is the slack accepted on the flow value.

    Returns:
        bool: True if P dominates Q.
    """
    tol = config.flow_tolerance
    P = _as_dict(p_dist, floor=0.0)
    Q = _as_dict(q_dist, floor=0.0)
    if not Q:
        return True

    if len(P) == 1:
        (top,) = P
        uncovered = sum(q for s, q in Q.items() if s & ~top)
        return uncovered <= tol

    if len(Q) == 1:
        (bottom,) = Q
        covering = sum(p for s, p in P.items() if bottom & ~s == 0)
        return covering >= Q[bottom] - tol

    p_marg = _item_marginals(P)
    for item, mass in _item_marginals(Q).items():
        if p_marg.get(item, 0.0) < mass - tol:
            return False

    p_sets = list(P)
    q_sets = list(Q)
    edges = [
        (a, b)
        for a, s in enumerate(p_sets)
        for b, t in enumerate(q_sets)
        if t & ~s == 0
    ]
    # a demand with no superset in the support can never be served
    served = {b for _, b in edges}
    if sum(Q[q_sets[b]] for b in range(len(q_sets)) if b not in served) > tol:
        return False

    m = len(edges)
    a_ub = np.zeros((len(p_sets) + len(q_sets), m))
    for k, (a, b) in enumerate(edges):
        a_ub[a, k] = 1.0
        a_ub[len(p_sets) + b, k] = 1.0
    b_ub = np.array([P[s] for s in p_sets] + [Q[t] for t in q_sets])
    res = linprog(
        c=-np.ones(m), A_ub=a_ub, b_ub=b_ub, bounds=(0, None), method="highs"
    )
    if res.status != 0:
        logger.warning(f"Dominance flow LP ended with status {res.status}: {res.message}")
        return False
    flow = -res.fun
    total = sum(Q.values())
    logger.debug(f"Dominance flow {flow:.12g} of {total:.12g}")
    return flow >= total - tol
