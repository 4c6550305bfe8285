"""Differentially private stopping rules and multi-armed bandit algorithms.

Thin wrapper around the compiled ``_dpbandits`` extension: noise primitives,
the NAS family of stopping rules, tree-based private counters, bandit
environments and algorithms (dp_se, dp_ucb, se, ucb), and the experiment grid
runner.
"""

from ._dpbandits import *  # noqa: F401,F403
