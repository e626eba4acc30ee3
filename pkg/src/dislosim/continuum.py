"""Coupled quasi-static elasticity and plastic-distortion evolution.

The traction boundary-value problem is replaced by a periodic cell with an
imposed mean stress: equilibrium is solved spectrally with a Fourier Green
operator (exact one shot for isotropic elasticity, fixed-point iteration
with an isotropic reference medium for general anisotropic maps).  The
plastic distortion evolves either as the full vector field h_p (frozen
where its driving direction is undefined) or, for single-slip-plane
problems, as the scalar slip field eps_p obeying the Hamilton-Jacobi law
with a Godunov upwind gradient norm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import grid as sg
from .errors import CflError, ConvergenceError, DislosimError
from .grid import PeriodicCell, cell_integral, divergence_residual, wavevectors
from .measures import DensityGrid
from .mobility import MobilityLaw
from .tensors import (IsotropicElasticity, isotropic_projection, slip_tensor,
                      sym)

DIV_TOL = 1e-10
MAX_ITER = 10_000
EPS_DIR = 1e-10
CFL_NUMBER = 0.5


@dataclass(frozen=True)
class SlipSystem:
    """Slip-plane normal g and in-plane Burgers vector b."""

    g: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.g, float)
        b = np.asarray(self.b, float)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "b", b)
        if abs(np.linalg.norm(g) - 1.0) > 1e-12:
            raise DislosimError("slip-plane normal must be a unit vector")
        if np.linalg.norm(b) <= 0.0:
            raise DislosimError("Burgers vector must be nonzero")
        if abs(b @ g) > 1e-12 * np.linalg.norm(b):
            raise DislosimError("Burgers vector must lie in the slip plane (b.g = 0)")

    @property
    def b_hat(self):
        return self.b / np.linalg.norm(self.b)

    @property
    def b_mag(self):
        return float(np.linalg.norm(self.b))

    @property
    def m(self):
        """Symmetrized slip dyad 0.5 (b_hat (x) g + g (x) b_hat)."""
        return slip_tensor(self.b_hat, self.g)


@dataclass
class SlipField:
    """Scalar slip eps_p per node; h_p = eps_p * g."""

    cell: PeriodicCell
    eps_p: np.ndarray
    system: SlipSystem

    def __post_init__(self):
        self.eps_p = np.asarray(self.eps_p, float)
        if self.eps_p.shape != self.cell.shape:
            raise DislosimError("slip field shape does not match the cell grid")
        if not np.all(np.isfinite(self.eps_p)):
            raise DislosimError("slip field must be finite")

    def plastic_strain(self):
        """Tensor eigenstrain field m * eps_p, shape (n1, n2, n3, 3, 3)."""
        return self.eps_p[..., None, None] * self.system.m

    def hp(self):
        """Vector plastic distortion eps_p * g."""
        return self.eps_p[..., None] * self.system.g


@dataclass
class PlasticDistortionField:
    """Vector plastic distortion h_p with b_hat . h_p = 0 node-wise."""

    cell: PeriodicCell
    hp: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        self.hp = np.asarray(self.hp, float)
        self.b = np.asarray(self.b, float)
        if self.hp.shape != self.cell.shape + (3,):
            raise DislosimError("h_p field shape does not match the cell grid")
        res = self.orthogonality_residual()
        if res > 1e-12 * max(1.0, float(np.abs(self.hp).max())):
            raise DislosimError(
                f"h_p must be orthogonal to the Burgers direction (residual {res:g})"
            )

    @property
    def b_hat(self):
        return self.b / np.linalg.norm(self.b)

    def orthogonality_residual(self):
        return float(np.abs(self.hp @ self.b_hat).max())

    def plastic_strain(self):
        """Eigenstrain sym(b_hat (x) h_p)."""
        bh = self.b_hat
        return sym(bh[None, None, None, :, None] * self.hp[..., None, :])


@dataclass
class MechanicalState:
    """Equilibrated stress state of the cell for a given eigenstrain."""

    cell: PeriodicCell
    stress: np.ndarray            # (n1, n2, n3, 3, 3)
    mean_stress: np.ndarray       # (3, 3)
    elasticity: object
    u: np.ndarray                 # periodic fluctuation displacement
    mean_strain: np.ndarray       # (3, 3) total mean strain
    free_energy: float
    div_residual: float
    iterations: int = 0


def _acoustic_inverse(cell, lam, mu):
    """A(k)^-1 for the isotropic acoustic tensor, zero at k = 0."""
    k = wavevectors(cell)
    k2 = np.einsum("...i,...i->...", k, k)
    safe = np.where(k2 > 0.0, k2, 1.0)
    khat = k / np.sqrt(safe)[..., None]
    coef = (lam + mu) / (lam + 2.0 * mu)
    eye = np.eye(3)
    ainv = (eye - coef * np.einsum("...i,...j->...ij", khat, khat)) / (
        mu * safe[..., None, None]
    )
    ainv[k2 == 0.0] = 0.0
    return ainv


def _compatible_strain(cell, s_field, lam, mu):
    """Strain of the displacement solving div(C0 eps(grad u) + s) = 0.

    Returns (strain_field, u_field); the k = 0 mode of both is zero.
    """
    sh = np.fft.fftn(np.asarray(s_field, float), axes=(0, 1, 2))
    k = wavevectors(cell)
    ainv = _acoustic_inverse(cell, lam, mu)
    sk = np.einsum("...ij,...j->...i", sh, k)
    uh = 1j * np.einsum("...ij,...j->...i", ainv, sk)
    gh = 1j * np.einsum("...i,...j->...ij", uh, k)
    eh = 0.5 * (gh + np.swapaxes(gh, -1, -2))
    eps = np.fft.ifftn(eh, axes=(0, 1, 2)).real
    u = np.fft.ifftn(uh, axes=(0, 1, 2)).real
    return eps, u


def solve_elasticity(cell: PeriodicCell, elasticity, plastic_strain, mean_stress,
                     tol=DIV_TOL, max_iter=MAX_ITER):
    """Equilibrium stress on the periodic cell with imposed mean stress.

    ``plastic_strain`` is the symmetric eigenstrain field (n1, n2, n3, 3, 3).
    Isotropic elasticity is solved in one shot with the exact Green
    operator; a general map iterates the fixed-point scheme with the
    isotropic reference medium closest to it and raises ConvergenceError
    if the spectral equilibrium residual stalls above ``tol``.
    """
    eps_p = np.asarray(plastic_strain, float)
    if eps_p.shape != cell.shape + (3, 3):
        raise DislosimError("plastic strain field shape does not match the cell")
    mean_stress = np.asarray(mean_stress, float)
    mean_eps_p = eps_p.mean(axis=(0, 1, 2))

    if isinstance(elasticity, IsotropicElasticity):
        s_field = elasticity.apply(eps_p - mean_eps_p)
        eps_fluct, u = _compatible_strain(cell, -s_field, elasticity.lam,
                                          elasticity.mu)
        mean_strain = elasticity.apply_inverse(mean_stress) + mean_eps_p
        eps_e = eps_fluct + mean_strain - eps_p
        stress = elasticity.apply(eps_e)
        iterations = 0
    else:
        kappa0, mu0 = isotropic_projection(elasticity)
        lam0 = kappa0 - 2.0 * mu0 / 3.0
        ref = IsotropicElasticity(lam0, mu0)
        mean_strain = elasticity.apply_inverse(mean_stress) + mean_eps_p
        eps_tot = np.broadcast_to(mean_strain, eps_p.shape).copy()
        u = np.zeros(cell.shape + (3,))
        stress = elasticity.apply(eps_tot - eps_p)
        res = np.inf
        for iterations in range(1, max_iter + 1):
            pol = stress - ref.apply(eps_tot - mean_strain)
            eps_fluct, u = _compatible_strain(cell, pol, lam0, mu0)
            mean_strain = mean_strain + ref.apply_inverse(
                mean_stress - stress.mean(axis=(0, 1, 2)))
            eps_tot = eps_fluct + mean_strain
            stress = elasticity.apply(eps_tot - eps_p)
            res = divergence_residual(cell, stress)
            mean_err = np.abs(stress.mean(axis=(0, 1, 2)) - mean_stress).max()
            scale = max(1.0, float(np.abs(stress).max()))
            if res <= tol and mean_err <= tol * scale:
                break
        else:
            raise ConvergenceError(
                f"elasticity fixed point did not reach tol={tol:g} in "
                f"{max_iter} iterations", residual=res)
        eps_e = eps_tot - eps_p

    psi = 0.5 * cell_integral(
        cell, np.einsum("...ij,...ij->...", stress, eps_e))
    return MechanicalState(
        cell=cell,
        stress=stress,
        mean_stress=mean_stress,
        elasticity=elasticity,
        u=u,
        mean_strain=mean_strain,
        free_energy=float(psi),
        div_residual=divergence_residual(cell, stress),
        iterations=iterations,
    )


def stress_from_fields(cell, elasticity, u, plastic_strain, mean_strain):
    """Stress D(eps(grad u) + mean_strain - eps_p) for given fields.

    Used to verify gauge invariance: the stress must not change when the
    same gradient is added to u (along b_hat) and to h_p.
    """
    k = wavevectors(cell)
    uh = np.fft.fftn(np.asarray(u, float), axes=(0, 1, 2))
    gh = 1j * np.einsum("...i,...j->...ij", uh, k)
    grad_u = np.fft.ifftn(gh, axes=(0, 1, 2)).real
    eps_e = sym(grad_u) + np.asarray(mean_strain, float) - np.asarray(
        plastic_strain, float)
    return elasticity.apply(eps_e)


def gauge_transform(cell, u, hp, b_hat, gamma):
    """Shift (u, h_p) by the same gradient: u' = u + b_hat*Gamma, h_p' = h_p + grad Gamma."""
    b_hat = np.asarray(b_hat, float)
    gamma = np.asarray(gamma, float)
    u_new = np.asarray(u, float) + gamma[..., None] * b_hat
    hp_new = np.asarray(hp, float) + sg.grad_scalar(cell, gamma)
    return u_new, hp_new


def resolved_stress(state_or_stress, system: SlipSystem):
    """Driving stress |b| * m : T per node."""
    stress = state_or_stress.stress if hasattr(state_or_stress, "stress") \
        else np.asarray(state_or_stress, float)
    return system.b_mag * np.einsum("ij,...ij->...", system.m, stress)


def _godunov_gradient(cell, phi, speed, axes):
    """Godunov upwind |grad phi| for d_t phi = speed * |grad phi|."""
    g2 = np.zeros_like(phi)
    expand = speed > 0.0  # fronts move toward smaller phi regions
    for axis in axes:
        h = cell.spacing[axis]
        dm = (phi - np.roll(phi, 1, axis=axis)) / h
        dp = (np.roll(phi, -1, axis=axis) - phi) / h
        # speed > 0 (phi grows): information flows from larger-phi side
        up = np.where(expand,
                      np.minimum(dm, 0.0) ** 2, np.maximum(dm, 0.0) ** 2)
        down = np.where(expand,
                        np.maximum(dp, 0.0) ** 2, np.minimum(dp, 0.0) ** 2)
        g2 = g2 + up + down
    return np.sqrt(g2)


def evolve_slip(sf: SlipField, state_or_stress, law: MobilityLaw, dt,
                gradient_norm=None):
    """One explicit Hamilton-Jacobi step d_t eps_p = f(|b| m:T) |grad_g eps_p|.

    The tangential gradient norm uses the Godunov monotone upwinding; if
    ``gradient_norm`` is given it replaces the upwind norm (used for the
    classical-model reduction where the dislocation density is taken
    uniform).
    """
    if abs(abs(sf.system.g[2]) - 1.0) > 1e-12:
        raise DislosimError("slip-plane evolution requires g aligned with the x3 axis")
    speed = law.f(resolved_stress(state_or_stress, sf.system))
    speed = np.broadcast_to(np.asarray(speed, float), sf.eps_p.shape)

    hmin = min(sf.cell.spacing[0], sf.cell.spacing[1])
    vmax = float(np.abs(speed).max())
    if vmax > 0.0 and dt * vmax > CFL_NUMBER * hmin * (1.0 + 1e-12):
        raise CflError(dt, CFL_NUMBER * hmin / vmax)

    if gradient_norm is None:
        gnorm = _godunov_gradient(sf.cell, sf.eps_p, speed, axes=(0, 1))
    else:
        gnorm = np.broadcast_to(np.asarray(gradient_norm, float), sf.eps_p.shape)
    return SlipField(sf.cell, sf.eps_p + dt * speed * gnorm, sf.system)


def classical_step(eps_p, state_or_stress, system: SlipSystem,
                   law: MobilityLaw, dt, burgers_scale=1.0):
    """Pointwise ODE update d_t eps_p = f(burgers_scale * m : T).

    ``burgers_scale = 1`` is the classical law in the resolved shear
    stress m : T; passing |b| reproduces the argument of the slip-plane
    Hamilton-Jacobi law.
    """
    stress = state_or_stress.stress if hasattr(state_or_stress, "stress") \
        else np.asarray(state_or_stress, float)
    resolved = burgers_scale * np.einsum("ij,...ij->...", system.m, stress)
    return np.asarray(eps_p, float) + dt * law.f(resolved)


def evolve_hp(field: PlasticDistortionField, state_or_stress, law: MobilityLaw,
              dt, eps_dir=EPS_DIR):
    """Explicit step of the vector plastic-distortion evolution.

    Works in the frame adapted to the Burgers direction (b_hat must be a
    coordinate axis): with d = derivative of h_p along that axis, the
    update is  h_p += dt * f(e . T b) * e * sqrt(|d|^2 + rot_b^2)  with
    e = -d/|d| and rot_b the b_hat-component of curl h_p.  Nodes where
    |d| < eps_dir have no defined direction and stay frozen.
    """
    cell = field.cell
    hp = field.hp
    b = field.b
    b_hat = field.b_hat
    axis = int(np.argmax(np.abs(b_hat)))
    if abs(abs(b_hat[axis]) - 1.0) > 1e-12:
        raise DislosimError("h_p evolution requires the Burgers vector on a grid axis")

    stress = state_or_stress.stress if hasattr(state_or_stress, "stress") \
        else np.asarray(state_or_stress, float)
    stress = np.broadcast_to(stress, cell.shape + (3, 3))

    h = cell.spacing[axis]
    d = (np.roll(hp, -1, axis=axis) - np.roll(hp, 1, axis=axis)) / (2.0 * h)
    if b_hat[axis] < 0.0:
        d = -d  # derivative along +b_hat
    nd = np.linalg.norm(d, axis=-1)
    active = nd > eps_dir
    e = np.zeros_like(d)
    np.divide(d, nd[..., None], out=e, where=active[..., None])
    e = -e

    rot_b = _curl_component_fd(cell, hp, b_hat)
    mag = np.sqrt(nd**2 + rot_b**2)
    tb = np.einsum("...ij,j->...i", stress, b)
    speed = law.f(np.einsum("...i,...i->...", e, tb))

    hmin = min(cell.spacing)
    vmax = float((np.abs(speed) * np.where(active, 1.0, 0.0)).max())
    if vmax > 0.0 and dt * vmax > CFL_NUMBER * hmin * (1.0 + 1e-12):
        raise CflError(dt, CFL_NUMBER * hmin / vmax)

    update = (dt * speed * mag)[..., None] * e
    hp_new = np.where(active[..., None], hp + update, hp)
    return PlasticDistortionField(cell, hp_new, b)


def _curl_component_fd(cell, v, direction):
    """Central-difference (curl v) . direction."""
    h = cell.spacing

    def dpart(f, axis):
        return (np.roll(f, -1, axis=axis) - np.roll(f, 1, axis=axis)) / (2.0 * h[axis])

    c0 = dpart(v[..., 2], 1) - dpart(v[..., 1], 2)
    c1 = dpart(v[..., 0], 2) - dpart(v[..., 2], 0)
    c2 = dpart(v[..., 1], 0) - dpart(v[..., 0], 1)
    return c0 * direction[0] + c1 * direction[1] + c2 * direction[2]


def dislocation_density_of_slip(sf: SlipField):
    """Density rho = (d2 eps_p, -d1 eps_p, 0): the rotated tangential gradient."""
    d1 = sg.partial(sf.cell, sf.eps_p, 0)
    d2 = sg.partial(sf.cell, sf.eps_p, 1)
    vec = np.stack([d2, -d1, np.zeros_like(d1)], axis=-1)
    return DensityGrid(sf.cell, vec)


@dataclass(frozen=True)
class EnergyLedger:
    psi_before: float
    psi_after: float
    dissipation: float

    @property
    def delta_psi(self):
        return self.psi_after - self.psi_before


def energy_ledger(state_before: MechanicalState, state_after: MechanicalState,
                  hp_rate, b_hat, dt, check=True, tol_energy=1e-10):
    """Free-energy balance over one step.

    ``dissipation`` is the cell integral of (T b_hat) . (d_t h_p) * dt using
    the pre-step stress.  At zero mean stress the cell is isolated and the
    free energy must not increase; with ``check=True`` a violation beyond
    ``tol_energy`` (relative to the starting energy) raises.
    """
    b_hat = np.asarray(b_hat, float)
    tb = np.einsum("...ij,j->...i", state_before.stress, b_hat)
    dens = np.einsum("...i,...i->...", tb, np.asarray(hp_rate, float))
    ledger = EnergyLedger(
        psi_before=state_before.free_energy,
        psi_after=state_after.free_energy,
        dissipation=dt * cell_integral(state_before.cell, dens),
    )
    if check and np.allclose(state_before.mean_stress, 0.0):
        scale = max(abs(ledger.psi_before), 1e-300)
        if ledger.delta_psi > tol_energy * scale:
            from .errors import InvariantViolation
            raise InvariantViolation(
                f"free energy increased at zero mean stress: "
                f"delta_psi = {ledger.delta_psi:g} > {tol_energy:g} * {scale:g}"
            )
    return ledger


def mollified_loop_slip(cell: PeriodicCell, center, radius, height,
                        width=None):
    """Smoothed indicator of a disc in the x1-x2 plane, extruded along x3.

    ``height`` is the plateau value (typically |b|); the transition width
    defaults to three grid spacings.
    """
    if width is None:
        width = 3.0 * min(cell.spacing[0], cell.spacing[1])
    x = cell.coords()
    cx = np.asarray(center, float)
    # periodic in-plane distance to the loop center
    d = np.zeros(cell.shape)
    r2 = np.zeros(cell.shape)
    for axis in (0, 1):
        delta = x[..., axis] - cx[axis]
        L = cell.lengths[axis]
        delta = (delta + 0.5 * L) % L - 0.5 * L
        r2 += delta**2
    d = np.sqrt(r2) - radius
    profile = 0.5 * (1.0 - np.tanh(d / width))
    return height * profile
