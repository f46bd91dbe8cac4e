"""Kernel-split panel Nystrom solver for the exterior Helmholtz Dirichlet problem."""

from .geometry import Curve, circle_curve, starfish_curve
from .system import assemble, discretize, evaluate_field, solve
from .testbench import default_sources, exact_field

__all__ = ["Curve", "assemble", "circle_curve", "default_sources", "discretize",
           "evaluate_field", "exact_field", "solve", "starfish_curve"]
__version__ = "0.1.0"
