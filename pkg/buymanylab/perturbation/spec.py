import logging
import math
from enum import Enum
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from buymanylab.config import DEFAULT_CONFIG, LabConfig
from buymanylab.errors import InstanceValidationError
from buymanylab.models.distribution import Atom, TypeDistribution
from buymanylab.models.menu import Menu
from buymanylab.models.valuation import Valuation
from buymanylab.utils.setfunctions import monotone_closure

logger = logging.getLogger(__name__)

Coupling = Tuple[int, ...]


class PerturbationMode(str, Enum):
    SCALAR = "scalar"
    PER_SET = "per_set"
    EXPLICIT = "explicit"


class PerturbationSpec(BaseModel):
    """
    How each atom v of D is mapped to its coupled atom v'.

    Modes:

    - ``scalar``: v' = f v with one factor per atom, given in ``factors`` or drawn
      uniformly from [1 - eps, 1 + eps].
    - ``per_set``: a multiplier m(S) in [1 - eps, 1 + eps] per set, drawn per atom, followed
      by the monotone repair v'(S) = max over T subset of S of m(T) v(T).
    - ``explicit``: the coupled valuations are given in ``targets``.
    """

    model_config = ConfigDict(frozen=True)

    epsilon: float = Field(gt=0, lt=1)
    mode: PerturbationMode = PerturbationMode.SCALAR
    seed: int = 0
    factors: Optional[Tuple[float, ...]] = None
    targets: Optional[Tuple[Valuation, ...]] = None

    @model_validator(mode="after")
    def check_inputs(self) -> "PerturbationSpec":
        if self.factors is not None:
            lo, hi = 1 - self.epsilon, 1 + self.epsilon
            for f in self.factors:
                if not lo - 1e-12 <= f <= hi + 1e-12:
                    raise ValueError(f"multiplier {f} outside [{lo}, {hi}]")
        if self.mode is PerturbationMode.EXPLICIT and self.targets is None:
            raise ValueError("explicit perturbation needs target valuations")
        return self

    @classmethod
    def identity(cls, epsilon: float, atoms: int) -> "PerturbationSpec":
        return cls(epsilon=epsilon, factors=(1.0,) * atoms)

    @classmethod
    def uniform_scaling(cls, epsilon: float, factor: float, atoms: int) -> "PerturbationSpec":
        return cls(epsilon=epsilon, factors=(factor,) * atoms)


def sandwich_holds(v: Valuation, w: Valuation, epsilon: float, tolerance: float = 1e-9) -> bool:
    """(1 - eps) v(S) <= w(S) <= (1 + eps) v(S) for every S, checked on full tables."""
    a, b = v.as_table(), w.as_table()
    slack = tolerance * np.maximum(1.0, a)
    return bool(np.all(b >= (1 - epsilon) * a - slack) and np.all(b <= (1 + epsilon) * a + slack))


def perturb(
    distribution: TypeDistribution,
    spec: PerturbationSpec,
    config: LabConfig = DEFAULT_CONFIG,
) -> Tuple[TypeDistribution, Coupling]:
    """
    Build the coupled distribution D'. The coupling maps atom k of D to atom k of D'.

    Raises:
        InstanceValidationError: If a coupled atom leaves the (1 +- eps) band.
    """
    eps = spec.epsilon
    rng = np.random.default_rng(spec.seed)
    count = len(distribution)
    atoms = []

    if spec.mode is PerturbationMode.EXPLICIT:
        if len(spec.targets) != count:
            raise InstanceValidationError(
                f"expected {count} target valuations, got {len(spec.targets)}", path="targets"
            )
        targets = list(spec.targets)
    elif spec.mode is PerturbationMode.SCALAR:
        factors = spec.factors or tuple(rng.uniform(1 - eps, 1 + eps, size=count))
        if len(factors) != count:
            raise InstanceValidationError(
                f"expected {count} factors, got {len(factors)}", path="factors"
            )
        targets = [a.valuation.scaled(f) for a, f in zip(distribution.atoms, factors)]
    else:
        targets = []
        for atom in distribution.atoms:
            table = atom.valuation.as_table()
            multipliers = rng.uniform(1 - eps, 1 + eps, size=len(table))
            targets.append(Valuation.from_table(monotone_closure(multipliers * table)))

    for idx, (atom, target) in enumerate(zip(distribution.atoms, targets)):
        if target.n != distribution.n:
            raise InstanceValidationError("target has the wrong number of items", path=f"targets.{idx}")
        if target.n <= config.max_table_items and not sandwich_holds(
            atom.valuation, target, eps, config.tolerance
        ):
            raise InstanceValidationError(
                f"coupled valuation leaves the (1 +- {eps}) band", path=f"targets.{idx}"
            )
        atoms.append(Atom(prob=atom.prob, valuation=target))

    logger.debug(f"Perturbed {count} atoms with mode {spec.mode.value}, eps={eps}")
    return TypeDistribution(atoms=tuple(atoms)), tuple(range(count))


def epsilon_prime(epsilon: float, n: int) -> float:
    """eps^(1/6) n^(1/2) (log2 n)^(1/6); the log factor is clamped to 1 when n = 1."""
    log_factor = math.log2(n) if n > 1 else 1.0
    return epsilon ** (1 / 6) * math.sqrt(n) * log_factor ** (1 / 6)


def discount_menu(menu: Menu, eps_prime: float) -> Menu:
    """Every entry keeps its allocation and is priced at (1 - eps') times its price."""
    if not 0 <= eps_prime < 1:
        raise ValueError(f"discount eps' must lie in [0, 1), got {eps_prime}")
    return menu.discounted(1.0 - eps_prime)
