"""Formal-group-law Soergel bimodules, verified up to a truncation degree."""

from soergel.bimod import Gen, Morphism, Obj, Setting, Summand
from soergel.complexes import (
    BoundedComplex,
    ChainMap,
    cx_tensor,
    gaussian_eliminate,
    rouquier,
    rouquier_inverse,
    verify_rouquier_invertible,
    verify_slide,
)
from soergel.expr import compute
from soergel.fgl import FormalGroupLaw, check_axioms, make_fgl
from soergel.kernels import BACKEND
from soergel.series import CoefficientRing, TruncatedSeries, TruncationContext
from soergel.weyl import ParabolicSubgroup, PolyRing

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BoundedComplex",
    "ChainMap",
    "CoefficientRing",
    "FormalGroupLaw",
    "Gen",
    "Morphism",
    "Obj",
    "ParabolicSubgroup",
    "PolyRing",
    "Setting",
    "Summand",
    "TruncatedSeries",
    "TruncationContext",
    "check_axioms",
    "compute",
    "cx_tensor",
    "gaussian_eliminate",
    "make_fgl",
    "rouquier",
    "rouquier_inverse",
    "verify_rouquier_invertible",
    "verify_slide",
]
