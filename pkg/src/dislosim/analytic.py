"""Closed-form fields of a straight dislocation line along the x3-axis.

The line carries a Burgers vector (b1, 0, b3) in an infinite isotropic
medium.  The displacement is multivalued with the cut placed on the half
plane ``Sigma = {x1 > 0, x2 = 0}``; the polar angle is taken in (0, 2*pi)
measured from the positive x1-axis, so the displacement jumps by
``-(b1, 0, b3)`` across Sigma.  The stress is smooth everywhere off the
line itself and homogeneous of degree -1 in (x1, x2).

These fields are exact and serve as the oracle for the grid-based solvers:
no core regularization is applied here, evaluation inside ``r_core`` is an
error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BranchCutError, CoreSingularityError
from .tensors import IsotropicElasticity

DEFAULT_R_CORE = 1e-12


@dataclass(frozen=True)
class StraightDislocation:
    """Straight line along the x3-axis with Burgers vector (b1, 0, b3)."""

    b1: float
    b3: float
    elasticity: IsotropicElasticity
    r_core: float = DEFAULT_R_CORE

    def __post_init__(self):
        if self.b1 == 0.0 and self.b3 == 0.0:
            raise ValueError("Burgers vector must be nonzero")

    @property
    def nu(self):
        return self.elasticity.nu

    @property
    def d1(self):
        """Edge prefactor mu*b1 / (2*pi*(1 - nu))."""
        return self.elasticity.mu * self.b1 / (2.0 * np.pi * (1.0 - self.nu))

    @property
    def d2(self):
        """Screw prefactor mu*b3 / (2*pi)."""
        return self.elasticity.mu * self.b3 / (2.0 * np.pi)

    @property
    def burgers(self):
        return np.array([self.b1, 0.0, self.b3])


def branch_angle(x1, x2):
    """Polar angle in (0, 2*pi) with the cut on {x1 > 0, x2 = 0}."""
    x1 = np.asarray(x1, float)
    x2 = np.asarray(x2, float)
    on_cut = (x2 == 0.0) & (x1 >= 0.0)
    if np.any(on_cut):
        raise BranchCutError("point lies on the branch-cut half plane Sigma")
    theta = np.arctan2(x2, x1)
    return np.where(theta <= 0.0, theta + 2.0 * np.pi, theta)


def _split(x):
    x = np.asarray(x, float)
    return x[..., 0], x[..., 1], x[..., 2]


def displacement(d: StraightDislocation, x):
    """Displacement u(x); x may be a single point or an (..., 3) array.

    Raises BranchCutError on the closed cut half plane; the field does not
    depend on x3.
    """
    x1, x2, _ = _split(x)
    theta = branch_angle(x1, x2)
    r2 = x1 * x1 + x2 * x2
    nu = d.nu
    u1 = d.b1 / (2.0 * np.pi) * (theta + x1 * x2 / (2.0 * (1.0 - nu) * r2))
    u2 = -d.b1 / (4.0 * np.pi * (1.0 - nu)) * (
        (1.0 - 2.0 * nu) * 0.5 * np.log(r2) + x1 * x1 / r2
    )
    u3 = d.b3 / (2.0 * np.pi) * theta
    return np.stack([u1, u2, u3], axis=-1)


def displacement_gradient(d: StraightDislocation, x):
    """Gradient (du_i/dx_j) of the displacement, smooth off the line.

    The gradient of the multivalued angle is single-valued, so this is
    well defined everywhere with r > 0, including across the cut.
    """
    x1, x2, _ = _split(x)
    r2 = x1 * x1 + x2 * x2
    if np.any(r2 <= d.r_core**2):
        raise CoreSingularityError("displacement gradient requested at the core")
    nu = d.nu
    k = 1.0 / (2.0 * (1.0 - nu))
    r4 = r2 * r2
    c1 = d.b1 / (2.0 * np.pi)
    c2 = d.b1 / (4.0 * np.pi * (1.0 - nu))
    c3 = d.b3 / (2.0 * np.pi)

    g = np.zeros(np.broadcast(x1, x2).shape + (3, 3))
    g[..., 0, 0] = c1 * (-x2 / r2 + k * x2 * (x2 * x2 - x1 * x1) / r4)
    g[..., 0, 1] = c1 * (x1 / r2 + k * x1 * (x1 * x1 - x2 * x2) / r4)
    g[..., 1, 0] = -c2 * ((1.0 - 2.0 * nu) * x1 / r2 + 2.0 * x1 * x2 * x2 / r4)
    g[..., 1, 1] = -c2 * ((1.0 - 2.0 * nu) * x2 / r2 - 2.0 * x1 * x1 * x2 / r4)
    g[..., 2, 0] = c3 * (-x2 / r2)
    g[..., 2, 1] = c3 * (x1 / r2)
    return g


def stress(d: StraightDislocation, x):
    """Cauchy stress T(x) of the straight dislocation; (..., 3, 3) output."""
    x1, x2, _ = _split(x)
    r2 = x1 * x1 + x2 * x2
    if np.any(r2 <= d.r_core**2):
        raise CoreSingularityError("stress requested on the dislocation core")
    r4 = r2 * r2
    d1, d2, nu = d.d1, d.d2, d.nu

    t = np.zeros(np.broadcast(x1, x2).shape + (3, 3))
    t11 = -d1 * x2 * (3.0 * x1 * x1 + x2 * x2) / r4
    t12 = d1 * x1 * (x1 * x1 - x2 * x2) / r4
    t22 = d1 * x2 * (x1 * x1 - x2 * x2) / r4
    t33 = -2.0 * nu * d1 * x2 / r2
    t13 = -d2 * x2 / r2
    t23 = d2 * x1 / r2
    t[..., 0, 0] = t11
    t[..., 1, 1] = t22
    t[..., 2, 2] = t33
    t[..., 0, 1] = t[..., 1, 0] = t12
    t[..., 0, 2] = t[..., 2, 0] = t13
    t[..., 1, 2] = t[..., 2, 1] = t23
    return t


def verify_equilibrium(d: StraightDislocation, x, h):
    """Max component of the centered finite-difference divergence of T.

    Second-order accurate in h; the stencil must stay clear of the core
    (ball of radius 2h around x must avoid the line).
    """
    x = np.asarray(x, float)
    r = np.hypot(x[0], x[1])
    if r <= 2.0 * h:
        raise CoreSingularityError("finite-difference stencil touches the core")
    div = np.zeros(3)
    for j in range(3):
        e = np.zeros(3)
        e[j] = h
        div += (stress(d, x + e)[:, j] - stress(d, x - e)[:, j]) / (2.0 * h)
    return float(np.abs(div).max())


def traction_limit_integral(d: StraightDislocation, r, test_fn,
                            z_range=(-1.0, 1.0), n_theta=256, n_z=64):
    """Integral of (T n) . phi over the cylinder of radius r around the line.

    ``n`` is the outward radial unit normal.  Trapezoid rule in the angle
    (periodic, hence spectrally accurate) and Gauss-Legendre in x3 over
    ``z_range``, which must contain the x3-support of ``test_fn``.  The
    caller checks decay as r -> 0.
    """
    if r <= 0.0:
        raise ValueError("cylinder radius must be positive")
    theta = np.linspace(0.0, 2.0 * np.pi, n_theta, endpoint=False)
    zq, zw = np.polynomial.legendre.leggauss(n_z)
    z0, z1 = z_range
    z = 0.5 * (z1 - z0) * zq + 0.5 * (z1 + z0)
    zw = zw * 0.5 * (z1 - z0)

    ct, st = np.cos(theta), np.sin(theta)
    pts = np.empty((n_theta, n_z, 3))
    pts[..., 0] = (r * ct)[:, None]
    pts[..., 1] = (r * st)[:, None]
    pts[..., 2] = z[None, :]
    n = np.zeros((n_theta, 1, 3))
    n[..., 0] = ct[:, None]
    n[..., 1] = st[:, None]

    tn = np.einsum("...ij,...j->...i", stress(d, pts), n)
    phi = np.asarray(test_fn(pts), float)
    integrand = np.einsum("...i,...i->...", tn, phi)
    # surface element r dtheta dz
    dtheta = 2.0 * np.pi / n_theta
    return float(np.einsum("tz,z->", integrand, zw) * r * dtheta)


def weak_rot_pairing(d: StraightDislocation, phit, support,
                     n_r=48, n_theta=64, n_z=48, fd_step=1e-5):
    """Both sides of the distributional curl identity for grad(u).

    Returns ``(lhs, rhs)`` with ``lhs = integral of grad(u) : rot(phit)``
    over the support box and ``rhs = integral over the line of
    (b (x) e3) : phit``.  ``rot`` is the right-handed row-wise curl,
    (rot A)_ij = (curl of row i of A)_j, evaluated on the test tensor by
    centered finite differences of step ``fd_step``.

    The volume quadrature runs in cylindrical coordinates around the line:
    the Jacobian r cancels the 1/r growth of grad(u), so the integrand is
    smooth and Gauss-Legendre in r and x3 with a trapezoid rule in the
    angle converges quickly.

    ``support`` is ((x1min, x1max), (x2min, x2max), (x3min, x3max)); the
    cylinder of radius r_max inscribed in the x1-x2 extent must contain the
    in-plane support of ``phit``.
    """
    (a1, b1), (a2, b2), (a3, b3) = support
    r_max = max(abs(a1), abs(b1), abs(a2), abs(b2)) * np.sqrt(2.0)

    rq, rw = np.polynomial.legendre.leggauss(n_r)
    rr = 0.5 * r_max * (rq + 1.0)
    rw = rw * 0.5 * r_max
    theta = np.linspace(0.0, 2.0 * np.pi, n_theta, endpoint=False)
    dtheta = 2.0 * np.pi / n_theta
    zq, zw = np.polynomial.legendre.leggauss(n_z)
    z = 0.5 * (b3 - a3) * zq + 0.5 * (b3 + a3)
    zw = zw * 0.5 * (b3 - a3)

    pts = np.empty((n_r, n_theta, n_z, 3))
    pts[..., 0] = (rr[:, None] * np.cos(theta)[None, :])[..., None]
    pts[..., 1] = (rr[:, None] * np.sin(theta)[None, :])[..., None]
    pts[..., 2] = z[None, None, :]

    grad_u = displacement_gradient(d, pts)
    rot = _tensor_rot_fd(phit, pts, fd_step)
    integrand = np.einsum("...ij,...ij->...", grad_u, rot)
    w = rw[:, None, None] * dtheta * zw[None, None, :] * rr[:, None, None]
    lhs = float(np.sum(integrand * w))

    line = np.zeros((n_z, 3))
    line[:, 2] = z
    nye = np.multiply.outer(d.burgers, np.array([0.0, 0.0, 1.0]))
    rhs = float(np.einsum("ij,zij,z->", nye, np.asarray(phit(line), float), zw))
    return lhs, rhs


def _tensor_rot_fd(phit, pts, h):
    """Row-wise curl of a tensor-valued test function by centered differences."""
    dphi = []
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        dphi.append((np.asarray(phit(pts + e), float)
                     - np.asarray(phit(pts - e), float)) / (2.0 * h))
    rot = np.zeros(pts.shape[:-1] + (3, 3))
    # (rot A)_ij = eps_{jkl} d_k A_il
    rot[..., :, 0] = dphi[1][..., :, 2] - dphi[2][..., :, 1]
    rot[..., :, 1] = dphi[2][..., :, 0] - dphi[0][..., :, 2]
    rot[..., :, 2] = dphi[0][..., :, 1] - dphi[1][..., :, 0]
    return rot
