"""Radii of gamma-spirallikeness for normalized special functions."""

from .families import (
    FAMILIES,
    InvalidParameters,
    Legendre,
    Lommel,
    MittagLeffler,
    Norm,
    NormalizedForm,
    Ramanujan,
    Struve,
    Wright,
    make_form,
    make_spec,
    wi_membership,
)
from .oracle import boundary_min, certified_radius, certify_disk, empirical_radius
from .radius import CONVEX, SPIRALLIKE, RadiusResult, SolverError, SpiralOrder, solve_radius, theta
from .zeros import check_interlacing, derivative_zeros, kernel_zeros

__version__ = "0.1.0"

__all__ = [
    "CONVEX", "FAMILIES", "InvalidParameters", "Legendre", "Lommel", "MittagLeffler", "Norm",
    "NormalizedForm", "RadiusResult", "Ramanujan", "SPIRALLIKE", "SolverError", "SpiralOrder",
    "Struve", "Wright", "boundary_min", "certified_radius", "certify_disk", "check_interlacing",
    "derivative_zeros", "empirical_radius", "kernel_zeros", "make_form", "make_spec",
    "solve_radius", "theta", "wi_membership",
]
