"""Estimate the number of nodes of a graph seen only through local queries."""

from .graph_core import *  # noqa: F401,F403
from .generators import *  # noqa: F401,F403
from .oracles import *  # noqa: F401,F403
from .estimators import *  # noqa: F401,F403
from . import graph_core, generators, oracles, estimators

__version__ = "0.1.0"
