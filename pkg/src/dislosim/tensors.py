"""Small-dimension tensor algebra: vectors, symmetric tensors, elasticity maps.

All quantities are dimensionless: lengths are measured in units of the
Burgers vector magnitude and stresses in units of the shear modulus.
Vectors are numpy arrays of shape ``(3,)`` and second-order tensors arrays
of shape ``(3, 3)``; symmetric tensors are ordinary ``(3, 3)`` arrays that
the constructors below build symmetric.  Symmetric tensors map to Mandel
6-vectors (ordering 11, 22, 33, 23, 13, 12 with a sqrt(2) factor on the
shear slots) so that the 6x6 matrix of an elasticity map inherits the
symmetry and definiteness of the underlying fourth-order tensor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DislosimError

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])
IDENTITY = np.eye(3)

_SQRT2 = np.sqrt(2.0)

# Mandel slot -> (i, j) index pairs
_MANDEL_PAIRS = ((0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1))


def vec3(x1, x2, x3):
    v = np.array([x1, x2, x3], dtype=float)
    if not np.all(np.isfinite(v)):
        raise DislosimError("vector components must be finite")
    return v


def outer(a, c):
    """Tensor product a (x) c, entries a_i c_j."""
    return np.multiply.outer(np.asarray(a, float), np.asarray(c, float))


def cross(a, c):
    return np.cross(np.asarray(a, float), np.asarray(c, float))


def contract(a, b):
    """Full contraction sum_ij a_ij b_ij (also works for vectors)."""
    return float(np.tensordot(np.asarray(a, float), np.asarray(b, float),
                              axes=np.asarray(a).ndim))


def sym(a):
    a = np.asarray(a, float)
    return 0.5 * (a + np.swapaxes(a, -1, -2))


def strain(grad_u):
    """Linear strain: the symmetric part of a displacement gradient."""
    return sym(grad_u)


def sym_tensor(t11, t22, t33, t23=0.0, t13=0.0, t12=0.0):
    """Symmetric tensor from its six independent components."""
    return np.array([
        [t11, t12, t13],
        [t12, t22, t23],
        [t13, t23, t33],
    ], dtype=float)


def slip_tensor(b_hat, g):
    """Symmetrized slip dyad 0.5 * (b_hat (x) g + g (x) b_hat).

    Both arguments must be unit vectors.
    """
    b_hat = np.asarray(b_hat, float)
    g = np.asarray(g, float)
    if abs(np.linalg.norm(b_hat) - 1.0) > 1e-12:
        raise DislosimError("slip direction must be a unit vector")
    if abs(np.linalg.norm(g) - 1.0) > 1e-12:
        raise DislosimError("plane normal must be a unit vector")
    return 0.5 * (outer(b_hat, g) + outer(g, b_hat))


def to_mandel(t):
    """Symmetric (..., 3, 3) tensor -> Mandel (..., 6) vector."""
    t = np.asarray(t, float)
    out = np.empty(t.shape[:-2] + (6,), dtype=t.dtype)
    for slot, (i, j) in enumerate(_MANDEL_PAIRS):
        out[..., slot] = t[..., i, j] * (1.0 if i == j else _SQRT2)
    return out


def from_mandel(v):
    """Mandel (..., 6) vector -> symmetric (..., 3, 3) tensor."""
    v = np.asarray(v, float)
    t = np.zeros(v.shape[:-1] + (3, 3), dtype=v.dtype)
    for slot, (i, j) in enumerate(_MANDEL_PAIRS):
        val = v[..., slot] * (1.0 if i == j else 1.0 / _SQRT2)
        t[..., i, j] = val
        t[..., j, i] = val
    return t


@dataclass(frozen=True)
class IsotropicElasticity:
    """Isotropic elasticity map e -> lam * tr(e) I + 2 mu e."""

    lam: float
    mu: float

    def __post_init__(self):
        if not (self.mu > 0.0):
            raise DislosimError("shear modulus mu must be positive")
        if not (3.0 * self.lam + 2.0 * self.mu > 0.0):
            raise DislosimError("bulk condition 3*lambda + 2*mu > 0 violated")

    @property
    def nu(self):
        """Poisson ratio lambda / (2 (lambda + mu))."""
        return self.lam / (2.0 * (self.lam + self.mu))

    def apply(self, e):
        e = np.asarray(e, float)
        tr = np.trace(e, axis1=-2, axis2=-1)
        return self.lam * tr[..., None, None] * IDENTITY + 2.0 * self.mu * e

    def apply_inverse(self, t):
        t = np.asarray(t, float)
        tr = np.trace(t, axis1=-2, axis2=-1)
        k = self.lam / (3.0 * self.lam + 2.0 * self.mu)
        return (t - k * tr[..., None, None] * IDENTITY) / (2.0 * self.mu)

    def mandel_matrix(self):
        m = 2.0 * self.mu * np.eye(6)
        m[:3, :3] += self.lam
        return m

    def full_tensor(self):
        return _full_from_mandel(self.mandel_matrix())

    @classmethod
    def from_poisson(cls, mu, nu):
        return cls(lam=2.0 * mu * nu / (1.0 - 2.0 * nu), mu=mu)


class GeneralElasticity:
    """Elasticity map given by a symmetric positive definite 6x6 Mandel matrix."""

    def __init__(self, matrix):
        m = np.array(matrix, dtype=float)
        if m.shape != (6, 6):
            raise DislosimError("elasticity matrix must be 6x6")
        if not np.allclose(m, m.T, atol=1e-12 * max(1.0, np.abs(m).max())):
            raise DislosimError("elasticity matrix must be symmetric")
        eig = np.linalg.eigvalsh(0.5 * (m + m.T))
        if eig.min() <= 0.0:
            raise DislosimError(
                f"elasticity matrix must be positive definite (min eigenvalue {eig.min():g})"
            )
        self.matrix = 0.5 * (m + m.T)

    def apply(self, e):
        return from_mandel(to_mandel(e) @ self.matrix.T)

    def apply_inverse(self, t):
        return from_mandel(to_mandel(t) @ np.linalg.inv(self.matrix).T)

    def mandel_matrix(self):
        return self.matrix.copy()

    def full_tensor(self):
        return _full_from_mandel(self.matrix)

    @classmethod
    def from_isotropic(cls, iso: IsotropicElasticity):
        return cls(iso.mandel_matrix())


def _full_from_mandel(m):
    """Expand a 6x6 Mandel matrix to the full 3x3x3x3 tensor D_ijkl."""
    d = np.zeros((3, 3, 3, 3))
    for a, (i, j) in enumerate(_MANDEL_PAIRS):
        fa = 1.0 if i == j else 1.0 / _SQRT2
        for b, (k, l) in enumerate(_MANDEL_PAIRS):
            fb = 1.0 if k == l else 1.0 / _SQRT2
            val = m[a, b] * fa * fb
            for (p, q) in ((i, j), (j, i)):
                for (r, s) in ((k, l), (l, k)):
                    d[p, q, r, s] = val
    return d


def apply_elasticity(d, e):
    """Apply an elasticity map (isotropic or general) to a symmetric tensor."""
    return d.apply(e)


def isotropic_projection(d):
    """Closest isotropic map (kappa, mu) to a general elasticity tensor."""
    full = d.full_tensor()
    tr_iijj = np.einsum("iijj->", full)
    tr_ijij = np.einsum("ijij->", full)
    kappa = tr_iijj / 9.0
    mu = (tr_ijij - tr_iijj / 3.0) / 10.0
    return kappa, mu
