"""Lyndon-Demuskin complexes over Z/p^s.

Exact cochain complexes for Demuskin groups with abelian and class-2
nilpotent coefficients, cup-product Gram matrices, G2 parabolic coefficient
systems, unipotent power formulas and finite-precision cocycle lifting.
"""

from .errors import InternalError, InvalidInputError
from .kernels import BACKEND
from .zmod import ModuleProfile, RingModulus

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "InternalError",
    "InvalidInputError",
    "ModuleProfile",
    "RingModulus",
    "__version__",
]
