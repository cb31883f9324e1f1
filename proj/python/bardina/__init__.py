"""Periodic-box spectral solver and filter-scale recovery toolkit."""

from bardina._bardina import *  # noqa: F401,F403
from bardina._bardina import __version__  # noqa: F401
