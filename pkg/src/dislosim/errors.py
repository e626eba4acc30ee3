"""Exception types shared across the package."""


class DislosimError(Exception):
    """Base class for all package errors."""


class ConfigError(DislosimError):
    """Invalid or unreadable scenario configuration."""


class InvariantViolation(DislosimError):
    """A model invariant failed during a run."""


class NumericalError(DislosimError):
    """Numerical failure (non-convergence, blow-up)."""


class CflError(NumericalError):
    """Time step violates the stability bound."""

    def __init__(self, dt, dt_max):
        self.dt = dt
        self.dt_max = dt_max
        super().__init__(
            f"time step dt={dt:g} violates the CFL bound; use dt <= {dt_max:g}"
        )


class CoreSingularityError(DislosimError):
    """Field evaluation requested on (or too close to) the dislocation line."""


class BranchCutError(DislosimError):
    """Displacement evaluation requested on the branch-cut half plane."""


class ScrewSingularityError(DislosimError):
    """Mobility evaluation at a screw point (tangent parallel to Burgers vector)."""


class ConvergenceError(NumericalError):
    """Iterative solver failed to reach the requested tolerance."""

    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message)
