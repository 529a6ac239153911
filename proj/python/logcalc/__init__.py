"""Operator logarithm calculus for evolution families.

Computes principal-branch logarithms of two-parameter evolution operators via
resolvent contour quadrature, reconstructs time-dependent generators, and
solves linear Cauchy problems through convergent power-series representations.
"""

from logcalc._core import *  # noqa: F401,F403
from logcalc._core import __version__  # noqa: F401
