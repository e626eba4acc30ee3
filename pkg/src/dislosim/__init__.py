"""dislosim: dislocation field theory and dynamics on periodic cells.

Analytic straight-dislocation fields, line measures and grid densities,
power-law glide mobility, front-tracking curve dynamics, a spectral
eigenstrain elasticity solver with slip-plane Hamilton-Jacobi evolution,
and a config-driven scenario CLI.
"""

from .analytic import StraightDislocation
from .continuum import (MechanicalState, SlipField, SlipSystem,
                        classical_step, energy_ledger, evolve_hp, evolve_slip,
                        gauge_transform, solve_elasticity)
from .curves import CurveState, RemeshParams, enclosed_radius, step
from .errors import (BranchCutError, CflError, ConfigError, ConvergenceError,
                     CoreSingularityError, DislosimError, InvariantViolation,
                     NumericalError, ScrewSingularityError)
from .grid import PeriodicCell
from .measures import (DensityGrid, DislocationCurve, circle_loop,
                       pair_tensor, pair_vector, rasterize)
from .mobility import (MobilityLaw, alpha_tilde, normal_velocity,
                       peach_koehler)
from .tensors import GeneralElasticity, IsotropicElasticity, slip_tensor

__version__ = "0.1.0"

__all__ = [
    "BranchCutError", "CflError", "ConfigError", "ConvergenceError",
    "CoreSingularityError", "CurveState", "DensityGrid", "DislocationCurve",
    "DislosimError", "GeneralElasticity", "InvariantViolation",
    "IsotropicElasticity", "MechanicalState", "MobilityLaw", "NumericalError",
    "PeriodicCell", "RemeshParams", "ScrewSingularityError", "SlipField",
    "SlipSystem", "StraightDislocation", "alpha_tilde", "circle_loop",
    "classical_step", "enclosed_radius", "energy_ledger", "evolve_hp",
    "evolve_slip", "gauge_transform", "normal_velocity", "pair_tensor",
    "pair_vector", "peach_koehler", "rasterize", "slip_tensor",
    "solve_elasticity", "step",
]
