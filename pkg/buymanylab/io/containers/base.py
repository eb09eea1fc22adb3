import json
from dataclasses import dataclass
from typing import Any, Dict, Generic, TypeVar

T = TypeVar("T")


def dump_json(payload: Any) -> str:
    """
    Deterministic JSON: sorted keys, shortest round-trip floats, non-finite floats as null.
    """
    return json.dumps(_finite(payload), sort_keys=True, indent=2) + "\n"


def _finite(value: Any) -> Any:
    if isinstance(value, float):
        return value if value == value and abs(value) != float("inf") else None
    if isinstance(value, dict):
        return {k: _finite(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite(v) for v in value]
    return value


@dataclass
class DataContainer(Generic[T]):
    """
    A generic container for data passed between processing stages.

    Attributes:
        data (T): The data stored in the container.
    """

    data: T

    def to_dict(self) -> Dict[str, Any]:
        return {k: v for k, v in self.__dict__.items() if not k.startswith("_")}

    def to_json(self) -> str:
        return dump_json(self.to_dict())
