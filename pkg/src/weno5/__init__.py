"""Finite-difference fifth-order WENO schemes (LOC, JS5, UD5) for
hyperbolic conservation laws."""

from weno5.stencil import (
    Fixed,
    Scaled,
    SchemeConfig,
    Variant,
    ideal_reconstruction,
    reconstruct_interface,
)

__all__ = [
    "Fixed",
    "Scaled",
    "SchemeConfig",
    "Variant",
    "ideal_reconstruction",
    "reconstruct_interface",
]
