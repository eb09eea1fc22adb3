from typing import Iterable, List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from buymanylab.models.valuation import Valuation

PROBABILITY_TOLERANCE = 1e-9


class Atom(BaseModel):
    model_config = ConfigDict(frozen=True)

    prob: float = Field(ge=0)
    valuation: Valuation


class TypeDistribution(BaseModel):
    """
    A finite discrete distribution over buyer valuations sharing the same n.

    Example:
        >>> d = TypeDistribution.from_pairs([(0.5, Valuation.from_additive([1])),
        ...                                  (0.5, Valuation.from_additive([2]))])
        >>> d.n
        1
    """

    model_config = ConfigDict(frozen=True)

    atoms: Tuple[Atom, ...] = Field(min_length=1)

    @model_validator(mode="after")
    def check_atoms(self) -> "TypeDistribution":
        total = sum(a.prob for a in self.atoms)
        if abs(total - 1.0) > PROBABILITY_TOLERANCE:
            raise ValueError(f"atom probabilities sum to {total}, expected 1")
        sizes = {a.valuation.n for a in self.atoms}
        if len(sizes) > 1:
            raise ValueError(f"atoms disagree on the number of items: {sorted(sizes)}")
        return self

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[float, Valuation]]) -> "TypeDistribution":
        return cls(atoms=tuple(Atom(prob=p, valuation=v) for p, v in pairs))

    @classmethod
    def point_mass(cls, valuation: Valuation) -> "TypeDistribution":
        return cls.from_pairs([(1.0, valuation)])

    @classmethod
    def uniform(cls, valuations: Sequence[Valuation]) -> "TypeDistribution":
        k = len(valuations)
        return cls.from_pairs([(1.0 / k, v) for v in valuations])

    @property
    def n(self) -> int:
        return self.atoms[0].valuation.n

    @property
    def probs(self) -> np.ndarray:
        return np.array([a.prob for a in self.atoms])

    @property
    def valuations(self) -> List[Valuation]:
        return [a.valuation for a in self.atoms]

    def __len__(self) -> int:
        return len(self.atoms)

    def restricted(self, indices: Iterable[int]) -> "TypeDistribution":
        """D restricted to ``indices``: every other atom becomes the zero valuation."""
        keep = set(indices)
        zero = Valuation.zero(self.n)
        return TypeDistribution(
            atoms=tuple(
                a if i in keep else Atom(prob=a.prob, valuation=zero)
                for i, a in enumerate(self.atoms)
            )
        )

    def scaled(self, factor: float) -> "TypeDistribution":
        return TypeDistribution(
            atoms=tuple(
                Atom(prob=a.prob, valuation=a.valuation.scaled(factor)) for a in self.atoms
            )
        )
