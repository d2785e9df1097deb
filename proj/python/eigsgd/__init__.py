"""Eigencomponent convergence experiments for SGD, GD and randomized Kaczmarz on least squares."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
