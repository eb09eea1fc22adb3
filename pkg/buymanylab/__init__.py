import logging
from .utils.logger import add_handlers

from .config import DEFAULT_CONFIG, LabConfig
from .errors import CapacityError, InstanceValidationError
from .io import Instance, load_instance, save_instance
from .models import Lottery, Menu, Semantics, TypeDistribution, Valuation
from .engine import best_response
from .pricing import revenue
from .verification import verify_buy_many

logger = logging.getLogger(__name__)
add_handlers(logger)
logger.setLevel(logging.INFO)

# Export them at the top level
__all__ = [
    "DEFAULT_CONFIG",
    "LabConfig",
    "CapacityError",
    "InstanceValidationError",
    "Instance",
    "load_instance",
    "save_instance",
    "Lottery",
    "Menu",
    "Semantics",
    "TypeDistribution",
    "Valuation",
    "best_response",
    "revenue",
    "verify_buy_many",
]
