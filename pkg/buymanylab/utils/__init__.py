from .logger import add_handlers, set_verbosity
from .setfunctions import mask_of, members_of, popcount

__all__ = ["add_handlers", "set_verbosity", "mask_of", "members_of", "popcount"]
