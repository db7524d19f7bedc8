"""Orthogonal polynomials for a Gaussian weight with one or two jumps.

Recurrence coefficients and Hankel determinants at arbitrary precision, the
residues of the ladder operators at the jumps, numerical verification of the
difference/differential identities they satisfy, and exact re-derivation of
their large-n expansions.
"""

from .moments import DegenerateWeightError, WeightSpec
from .numerics import PrecisionContext, PrecisionError
from .ortho import OrthoSystem, build_system

__version__ = "0.1.0"

__all__ = [
    "DegenerateWeightError",
    "OrthoSystem",
    "PrecisionContext",
    "PrecisionError",
    "WeightSpec",
    "build_system",
]
