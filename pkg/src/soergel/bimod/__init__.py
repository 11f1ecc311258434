"""Bimodule calculus: generators, normal forms, morphisms, structure maps."""

from soergel.bimod.core import (
    Gen,
    Morphism,
    Obj,
    Setting,
    Summand,
    block_matrix,
    check_equivariance,
)

__all__ = ["Gen", "Morphism", "Obj", "Setting", "Summand", "block_matrix", "check_equivariance"]
