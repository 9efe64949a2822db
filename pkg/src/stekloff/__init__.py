"""Numerical laboratory for the electromagnetic Stekloff eigenvalue problem."""

from . import ball, blockop, radial, specfun
from .ball import Family, ModeIndex, ball_spectrum, residual_check, scalar_lb_eigenvalue, te_eigenvalue, tm_eigenvalue
from .errors import (
    AssemblyError,
    AssumptionError,
    DomainError,
    ModelInvariantError,
    PoleError,
    SingularPencilError,
    StekloffError,
    ValidityError,
)
from .radial import ModifiedSpectrumResult, RadialBasis, s_projection_solve, scalar_lb_solve, te_radial_solve
from .specfun import sph_bessel

__version__ = "0.1.0"
