"""Forward and inverse fixed-energy scattering for piecewise-constant radial potentials."""

from .errors import (
    DimensionMismatch,
    DomainError,
    EmptyWindow,
    KappaDomainError,
    NoConvergence,
    NonConvergedRefinement,
    PolePassageError,
    StepFailure,
)
from .inversion import NewtonConfig, NewtonTrace, gauss_solve_truncated, newton_solve
from .scattering import (
    InterfaceMatrix,
    KappaVector,
    PhaseShiftSet,
    PiecewiseConstantPotential,
    interface_matrix,
    kappa_from_potential,
    phase_shift,
    phase_shifts,
    potential_from_kappa,
    propagate_ratio,
    residual,
)
from .sensitivity import interface_matrix_partials, jacobian, propagate_sensitivities
from .special import RiccatiBesselValues, riccati_bessel, riccati_bessel_row

__version__ = "0.1.0"
