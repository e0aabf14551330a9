"""Open-system simulation of a three-spin Feynman-machine unit."""
from .model import ModelParams

__version__ = "0.1.0"
__all__ = ["ModelParams"]
