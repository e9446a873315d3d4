"""Finite-model workbench for relational parametricity.

System F syntax and evaluation, finite reflexive-graph semantics,
a split fibration of type functors over contexts, and law suites
that check the equational structure on small carriers.
"""

__version__ = "0.1.0"

from . import cubemodel, fibration, finmodel, interp, rgalg, systemf  # noqa: E402,F401
