"""Numerical laboratory for discrete Lagrangian systems on Lie groups.

Submodules
----------
circle
    Periodic grid functions and circle diffeomorphisms.
virasoro
    The Virasoro group, its algebra, and the H^1 inertia operator.
chflows
    The Camassa-Holm family of Euler equations on the Virasoro algebra.
rigid_body
    The Moser-Veselov discrete rigid body and its continuous limit.
discrete
    Right-invariant discrete Lagrangians on the Virasoro group.
experiments, cli
    The ``vir-lab`` run-descriptor front end.
"""
from . import chflows, circle, discrete, rigid_body, virasoro
from .errors import VirLabError

__version__ = "0.1.0"

__all__ = ["chflows", "circle", "discrete", "rigid_body", "virasoro", "VirLabError",
           "__version__"]
