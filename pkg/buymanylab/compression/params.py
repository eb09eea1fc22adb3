import math
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class CompressionParams(BaseModel):
    """
    Constants of the two compression stages.

    ``items`` is the number of coordinates the constants are derived from: n for the
    unit-demand path and 2^n for the meta-item path. By default delta = eps^3 / items^3,
    the grid step is delta^2 and the stage discounts are (1 - sqrt(eps)) and
    (1 - sqrt(delta)). Every derived constant can be overridden for sensitivity runs.
    """

    model_config = ConfigDict(frozen=True)

    epsilon: float = Field(gt=0, lt=1)
    items: int = Field(ge=1)
    delta_override: Optional[float] = Field(default=None, gt=0, lt=1)
    grid_step_override: Optional[float] = Field(default=None, gt=0, le=1)
    small_discount_override: Optional[float] = Field(default=None, gt=0, le=1)
    grid_discount_override: Optional[float] = Field(default=None, gt=0, le=1)

    @model_validator(mode="after")
    def check_delta(self) -> "CompressionParams":
        if not 0 < self.delta < 1:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if self.grid_step <= 0:
            raise ValueError("grid step must be positive")
        return self

    @property
    def delta(self) -> float:
        if self.delta_override is not None:
            return self.delta_override
        return self.epsilon**3 / self.items**3

    @property
    def grid_step(self) -> float:
        if self.grid_step_override is not None:
            return self.grid_step_override
        return self.delta**2

    @property
    def small_discount(self) -> float:
        if self.small_discount_override is not None:
            return self.small_discount_override
        return 1.0 - math.sqrt(self.epsilon)

    @property
    def grid_discount(self) -> float:
        if self.grid_discount_override is not None:
            return self.grid_discount_override
        return 1.0 - math.sqrt(self.delta)

    @property
    def revenue_target_factor(self) -> float:
        """Compressed revenue should retain at least (1 - 4 sqrt(eps)); clipped at 0."""
        return max(0.0, 1.0 - 4.0 * math.sqrt(self.epsilon))

    def size_bound_log10(self) -> float:
        """log10 of (1 + 1/step)^items, the number of distinct grid vectors."""
        return self.items * math.log10(1.0 + 1.0 / self.grid_step)

    def within_size_bound(self, size: int) -> bool:
        if size <= 1:
            return True
        return math.log10(size) <= self.size_bound_log10() + 1e-12

    def describe(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "items": self.items,
            "delta": self.delta,
            "grid_step": self.grid_step,
            "small_discount": self.small_discount,
            "grid_discount": self.grid_discount,
            "size_bound_log10": self.size_bound_log10(),
        }
