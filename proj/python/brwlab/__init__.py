"""Branching random walk laboratory: simulation and analytics on Z."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401
