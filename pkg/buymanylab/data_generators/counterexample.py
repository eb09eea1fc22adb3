import logging
from typing import Any, Dict, Tuple

from pydantic import BaseModel, ConfigDict

from buymanylab.data_generators.basegenerators import BaseGenerator, register_generator
from buymanylab.errors import InstanceValidationError
from buymanylab.io.instance import Instance, instance_document
from buymanylab.models.distribution import Atom, TypeDistribution
from buymanylab.models.menu import Menu
from buymanylab.models.valuation import Valuation
from buymanylab.perturbation.spec import sandwich_holds
from buymanylab.verification.buymany import expand_item_pricing

logger = logging.getLogger(__name__)


class CounterexampleInstance(BaseModel):
    """
    A unit-demand distribution D whose buy-one revenue is discontinuous, its coupled
    perturbation D' and the item pricing that earns n on D.

    Atom k of D (k = 1..n) values item k-1 at ((1+eps)/eps) c^k and every other item at
    (1/eps) c^k with probability c^-k, where c = (1+delta)/delta. The last atom is the zero
    valuation carrying the remaining mass. D' replaces every atom by the flat (1/eps) c^k.
    """

    model_config = ConfigDict(frozen=True)

    n: int
    epsilon: float
    delta: float
    base: float
    distribution: TypeDistribution
    perturbed: TypeDistribution
    coupling: Tuple[int, ...]
    prices: Tuple[float, ...]
    menu: Menu

    @property
    def instance(self) -> Instance:
        return Instance(n=self.n, distribution=self.distribution, menu=self.menu)

    @property
    def perturbed_instance(self) -> Instance:
        return Instance(n=self.n, distribution=self.perturbed, menu=self.menu)

    def coupling_valid(self, tolerance: float = 1e-9) -> bool:
        return all(
            sandwich_holds(a.valuation, self.perturbed.atoms[k].valuation, self.epsilon, tolerance)
            for a, k in zip(self.distribution.atoms, self.coupling)
        )


def gen_counterexample(n: int, epsilon: float, delta: float) -> CounterexampleInstance:
    """
    Build the discontinuity example.

    Raises:
        InstanceValidationError: Unless eps * n > 1, eps in (0, 1) and delta in (0, 1].
    """
    if n < 1:
        raise InstanceValidationError("n must be at least 1", path="n")
    if not 0 < epsilon < 1:
        raise InstanceValidationError(f"eps must lie in (0, 1), got {epsilon}", path="eps")
    if epsilon * n <= 1:
        raise InstanceValidationError(f"eps * n must exceed 1, got {epsilon * n}", path="eps")
    if not 0 < delta <= 1:
        raise InstanceValidationError(f"delta must lie in (0, 1], got {delta}", path="delta")

    c = (1 + delta) / delta
    atoms, flat_atoms = [], []
    for k in range(1, n + 1):
        scale = c**k
        prob = c ** (-k)
        values = [scale / epsilon] * n
        values[k - 1] = (1 + epsilon) / epsilon * scale
        atoms.append(Atom(prob=prob, valuation=Valuation.from_unit_demand(values)))
        flat_atoms.append(Atom(prob=prob, valuation=Valuation.from_unit_demand([scale / epsilon] * n)))

    residual = 1.0 - sum(a.prob for a in atoms)
    zero = Atom(prob=max(residual, 0.0), valuation=Valuation.zero(n))
    atoms.append(zero)
    flat_atoms.append(zero)

    prices = tuple(c ** (i + 1) for i in range(n))
    logger.debug(f"Counterexample with n={n}, c={c:g}, residual mass {residual:.6g}")
    return CounterexampleInstance(
        n=n,
        epsilon=epsilon,
        delta=delta,
        base=c,
        distribution=TypeDistribution(atoms=tuple(atoms)),
        perturbed=TypeDistribution(atoms=tuple(flat_atoms)),
        coupling=tuple(range(n + 1)),
        prices=prices,
        menu=expand_item_pricing(prices),
    )


@register_generator
class CounterexampleGenerator(BaseGenerator):
    kind = "counterexample"

    def generate(
        self,
        seed: int = 0,
        n: int = 4,
        eps: float = 0.5,
        delta: float = 1.0,
        perturbed: bool = False,
        **params: Any,
    ) -> Dict[str, Any]:
        example = gen_counterexample(n, eps, delta)
        instance = example.perturbed_instance if perturbed else example.instance
        return instance_document(instance)
