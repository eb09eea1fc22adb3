from typing import Any, Dict, List


class Registry:
    def __init__(self):
        self.registry = {}

    def register(self, cls):
        self.registry[getattr(cls, "kind", None) or cls.__name__] = cls
        return cls

    def get(self, name):
        if name not in self.registry:
            raise ValueError(f"No generator registered for '{name}'")
        return self.registry.get(name)()

    def kinds(self) -> List[str]:
        return sorted(k for k, cls in self.registry.items() if k != "BaseGenerator")


generator_registry = Registry()


def register_generator(cls):
    generator_registry.register(cls)
    return cls


@register_generator
class BaseGenerator:
    """
    An instance family exposed to the ``gen`` command.

    ``generate`` returns a JSON-ready document; keyword arguments are the family's
    parameters.
    """

    kind: str = ""

    def generate(self, seed: int = 0, **params: Any) -> Dict[str, Any]:
        raise NotImplementedError("Each generator must implement a 'generate' method.")
