import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from buymanylab.errors import InstanceValidationError
from buymanylab.io.containers.base import dump_json
from buymanylab.models.distribution import Atom, TypeDistribution
from buymanylab.models.lottery import Lottery
from buymanylab.models.menu import Menu, Semantics
from buymanylab.models.valuation import Valuation, ValuationKind
from buymanylab.utils.setfunctions import mask_of, members_of

logger = logging.getLogger(__name__)


class AllocationDocument(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    items: List[int] = Field(alias="set")
    prob: float


class LotteryDocument(BaseModel):
    allocation: List[AllocationDocument]
    price: float


class MenuDocument(BaseModel):
    semantics: Semantics = Semantics.BUY_ONE
    entries: List[LotteryDocument] = []


class ValuationDocument(BaseModel):
    kind: ValuationKind
    values: List[Any]


class AtomDocument(BaseModel):
    prob: float
    valuation: ValuationDocument


class InstanceDocument(BaseModel):
    """The JSON schema of an instance file."""

    n: int = Field(ge=1)
    distribution: List[AtomDocument] = Field(min_length=1)
    menu: MenuDocument = MenuDocument()


class Instance(BaseModel):
    """A validated instance: n, a type distribution and a menu over the same items."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1)
    distribution: TypeDistribution
    menu: Menu = Menu()

    @model_validator(mode="after")
    def check_items(self) -> "Instance":
        if self.distribution.n != self.n:
            raise ValueError(f"valuations have {self.distribution.n} items but n={self.n}")
        self.menu.check_items(self.n)
        return self


def _path(loc) -> str:
    return ".".join(str(part) for part in loc)


def _valuation(doc: ValuationDocument) -> Valuation:
    values = tuple(tuple(c) if isinstance(c, list) else c for c in doc.values)
    return Valuation(kind=doc.kind, values=values)


def _build(doc: InstanceDocument) -> Instance:
    atoms = []
    for idx, atom in enumerate(doc.distribution):
        path = f"distribution.{idx}.valuation"
        try:
            valuation = _valuation(atom.valuation)
        except ValidationError as e:
            raise InstanceValidationError(e.errors()[0]["msg"], path=path) from e
        if valuation.n != doc.n:
            raise InstanceValidationError(
                f"valuation has {valuation.n} items but n={doc.n}", path=path
            )
        try:
            atoms.append(Atom(prob=atom.prob, valuation=valuation))
        except ValidationError as e:
            raise InstanceValidationError(e.errors()[0]["msg"], path=f"distribution.{idx}") from e
    try:
        distribution = TypeDistribution(atoms=tuple(atoms))
    except ValidationError as e:
        raise InstanceValidationError(e.errors()[0]["msg"], path="distribution") from e

    entries = []
    for idx, entry in enumerate(doc.menu.entries):
        path = f"menu.entries.{idx}"
        for member in (i for a in entry.allocation for i in a.items):
            if not 0 <= member < doc.n:
                raise InstanceValidationError(f"item {member} outside 0..{doc.n - 1}", path=path)
        pairs = tuple((mask_of(a.items), a.prob) for a in entry.allocation)
        try:
            entries.append(Lottery(allocation=pairs, price=entry.price))
        except ValidationError as e:
            raise InstanceValidationError(e.errors()[0]["msg"], path=path) from e
    menu = Menu(entries=tuple(entries), semantics=doc.menu.semantics)
    return Instance(n=doc.n, distribution=distribution, menu=menu)


def load_instance(source: Union[str, Path, Dict[str, Any]]) -> Instance:
    """
    Load and validate an instance document.

    Args:
        source: A path to a JSON file, a JSON string, or an already parsed dict.

    Returns:
        Instance: The validated instance.

    Raises:
        InstanceValidationError: On a schema or invariant violation; ``path`` locates it.
    """
    if isinstance(source, dict):
        payload = source
    else:
        text = str(source)
        if isinstance(source, Path) or not text.lstrip().startswith("{"):
            text = Path(source).read_text()
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as e:
            raise InstanceValidationError(f"invalid JSON: {e}") from e

    try:
        doc = InstanceDocument.model_validate(payload)
    except ValidationError as e:
        first = e.errors()[0]
        raise InstanceValidationError(first["msg"], path=_path(first["loc"])) from e
    instance = _build(doc)
    logger.debug(
        f"Loaded instance with n={instance.n}, {len(instance.distribution)} atoms, "
        f"{len(instance.menu)} menu entries"
    )
    return instance


def menu_document(menu: Menu) -> Dict[str, Any]:
    return {
        "semantics": menu.semantics.value,
        "entries": [
            {
                "allocation": [
                    {"set": members_of(items), "prob": prob} for items, prob in lottery.allocation
                ],
                "price": lottery.price,
            }
            for lottery in menu.entries
        ],
    }


def instance_document(instance: Instance) -> Dict[str, Any]:
    """The JSON-ready document of ``instance``, with sets written as sorted member lists."""
    return {
        "n": instance.n,
        "distribution": [
            {
                "prob": atom.prob,
                "valuation": {
                    "kind": atom.valuation.kind.value,
                    "values": [
                        list(c) if isinstance(c, tuple) else c for c in atom.valuation.values
                    ],
                },
            }
            for atom in instance.distribution.atoms
        ],
        "menu": menu_document(instance.menu),
    }


def save_instance(instance: Instance, path: Optional[Union[str, Path]] = None) -> Dict[str, Any]:
    """Return the document of ``instance`` and write it to ``path`` when given."""
    document = instance_document(instance)
    if path is not None:
        Path(path).write_text(dump_json(document))
        logger.debug(f"Saved instance to {path}")
    return document
