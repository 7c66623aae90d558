"""
briesz - Bochner-Riesz means on sampled grids: kernels, Lp and Grand Lebesgue bounds.
"""

__version__ = "0.1.0"
__author__ = "briesz Developers"
__email__ = "developers@briesz.dev"

# Import public API
from .api import *
