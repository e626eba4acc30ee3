"""Constitutive mobility: Peach-Koehler force and normal-velocity laws.

The constitutive function is the odd power law f(s) = C |s|^(gamma-1) s,
which satisfies s * f(s) >= 0.  The line mobility is singular at screw
points (tangent parallel to the Burgers vector); those raise an error
rather than being regularized, because the direction of motion is simply
not determined there.  Slip-plane evolution (see ``continuum``) never
needs this branch: there the glide-normal direction is fixed by the plane.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DislosimError, ScrewSingularityError


@dataclass(frozen=True)
class MobilityLaw:
    """Odd power law f(s) = C |s|^(gamma - 1) s with C > 0, gamma >= 1."""

    C: float = 1.0
    gamma: float = 1.0

    def __post_init__(self):
        if not self.C > 0.0:
            raise DislosimError("mobility constant C must be positive")
        if not self.gamma >= 1.0:
            raise DislosimError("mobility exponent gamma must be >= 1")

    def f(self, s):
        s = np.asarray(s, float)
        if self.gamma == 1.0:
            out = self.C * s
        else:
            out = self.C * np.abs(s) ** (self.gamma - 1.0) * s
        return out if out.ndim else float(out)


def validate_constitutive(f, samples=None):
    """Check oddness and s*f(s) >= 0 for a user-supplied function."""
    if samples is None:
        samples = np.concatenate([[0.0], np.geomspace(1e-6, 1e3, 40)])
    for s in samples:
        fp, fm = f(s), f(-s)
        if s * fp < 0.0 or abs(fp + fm) > 1e-12 * max(1.0, abs(fp)):
            raise DislosimError("constitutive function must be odd with s*f(s) >= 0")
    return True


def _unit(tau):
    tau = np.asarray(tau, float)
    if abs(np.linalg.norm(tau) - 1.0) > 1e-9:
        raise DislosimError("tangent must be a unit vector")
    return tau


def peach_koehler(tau, stress, burgers):
    """Configurational force per unit line length, F = tau x (T b)."""
    tau = _unit(tau)
    tb = np.asarray(stress, float) @ np.asarray(burgers, float)
    return np.cross(tau, tb)


def _check_screw(b, tau, eps_screw):
    bxt = np.cross(b, tau)
    norm = np.linalg.norm(bxt)
    if eps_screw is None:
        eps_screw = 1e-8 * np.linalg.norm(b)
    if norm <= eps_screw:
        raise ScrewSingularityError(
            "tangent is (nearly) parallel to the Burgers vector; "
            "the mobility direction is undefined at screw points"
        )
    return norm


def alpha_tilde(law: MobilityLaw, tau, xi, burgers, eps_screw=None):
    """Constitutive flux direction b * f(b . xi / |b x tau|) / |b x tau|.

    Parallel to b by construction, which is what keeps plastic flow
    volume conserving; satisfies xi . alpha >= 0.
    """
    tau = _unit(tau)
    b = np.asarray(burgers, float)
    norm = _check_screw(b, tau, eps_screw)
    s = float(b @ np.asarray(xi, float)) / norm
    return b * (law.f(s) / norm)


def glide_plane_normal(tau, burgers, eps_screw=None):
    """Unit vector (b x tau)/|b x tau|."""
    tau = _unit(tau)
    b = np.asarray(burgers, float)
    norm = _check_screw(b, tau, eps_screw)
    return np.cross(b, tau) / norm


def b_perp(tau, burgers, eps_screw=None):
    """Unit vector along proj_tau(b), the in-plane glide direction."""
    tau = _unit(tau)
    b = np.asarray(burgers, float)
    _check_screw(b, tau, eps_screw)
    p = b - (b @ tau) * tau
    return p / np.linalg.norm(p)


def normal_velocity(law: MobilityLaw, tau, stress, burgers, eps_screw=None):
    """Normal velocity v = f(b_perp . F) b_perp with F the Peach-Koehler force."""
    p = b_perp(tau, burgers, eps_screw)
    force = peach_koehler(tau, stress, burgers)
    return law.f(float(p @ force)) * p


def normal_velocity_via_alpha(law: MobilityLaw, tau, stress, burgers,
                              eps_screw=None):
    """Equivalent velocity proj_tau(alpha_tilde(tau, F)); independent route."""
    tau = _unit(tau)
    force = peach_koehler(tau, stress, burgers)
    a = alpha_tilde(law, tau, force, burgers, eps_screw)
    return a - (a @ tau) * tau


def dissipation_density(stress, b_hat, alpha_value):
    """Pointwise dissipation pairing (T b_hat) . alpha.

    Nonnegative when ``alpha_value`` is an admissible plastic-flow rate
    (one driven by the resolved stress through an odd law); for the bare
    constitutive flux alpha_tilde the sign-definite pairing is with the
    Peach-Koehler force instead.
    """
    tb = np.asarray(stress, float) @ np.asarray(b_hat, float)
    return float(tb @ np.asarray(alpha_value, float))


def glide_direction_check(tau, burgers, v, rtol=1e-10, eps_screw=None):
    """True iff v is parallel to proj_tau(b) (volume-conserving glide)."""
    v = np.asarray(v, float)
    nv = np.linalg.norm(v)
    if nv == 0.0:
        return True
    p = b_perp(tau, burgers, eps_screw)
    off = v - (v @ p) * p
    return bool(np.linalg.norm(off) <= rtol * nv)
