"""Periodic cell geometry and Fourier differential operators.

Grid fields are stored node-wise with the grid axes first, e.g. a vector
field has shape ``(n1, n2, n3, 3)`` and a tensor field ``(n1, n2, n3, 3, 3)``.
First derivatives zero the Nyquist modes so that real fields stay real and
odd operators stay skew-adjoint on the grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DislosimError


@dataclass(frozen=True)
class PeriodicCell:
    """Rectangular periodic box with an even grid in each direction."""

    lengths: tuple
    shape: tuple

    def __post_init__(self):
        lengths = tuple(float(v) for v in self.lengths)
        shape = tuple(int(v) for v in self.shape)
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "shape", shape)
        if len(lengths) != 3 or len(shape) != 3:
            raise DislosimError("cell needs three lengths and three grid sizes")
        if any(L <= 0.0 for L in lengths):
            raise DislosimError("cell lengths must be positive")
        for n in shape:
            if n < 8 or n % 2 != 0:
                raise DislosimError("grid resolution must be even and >= 8")

    @property
    def spacing(self):
        return tuple(L / n for L, n in zip(self.lengths, self.shape))

    @property
    def volume(self):
        return self.lengths[0] * self.lengths[1] * self.lengths[2]

    @property
    def node_volume(self):
        h = self.spacing
        return h[0] * h[1] * h[2]

    def axes(self):
        """Node coordinate arrays along each axis."""
        return tuple(np.arange(n) * h for n, h in zip(self.shape, self.spacing))

    def coords(self):
        """Node coordinates, shape (n1, n2, n3, 3)."""
        x1, x2, x3 = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack([x1, x2, x3], axis=-1)


@lru_cache(maxsize=32)
def _wavenumbers(lengths, shape):
    ks = []
    for L, n in zip(lengths, shape):
        k = 2.0 * np.pi * np.fft.fftfreq(n, d=L / n)
        k[n // 2] = 0.0  # drop Nyquist for odd-order derivatives
        ks.append(k)
    k1, k2, k3 = np.meshgrid(*ks, indexing="ij")
    return np.stack([k1, k2, k3], axis=-1)


def wavevectors(cell: PeriodicCell):
    """Wavevector field, shape (n1, n2, n3, 3), Nyquist rows zeroed."""
    return _wavenumbers(cell.lengths, cell.shape)


def _fft(f):
    return np.fft.fftn(f, axes=(0, 1, 2))


def _ifft(f):
    return np.fft.ifftn(f, axes=(0, 1, 2)).real


def grad_scalar(cell, f):
    """Spectral gradient of a scalar field -> (n1, n2, n3, 3)."""
    k = wavevectors(cell)
    fh = _fft(np.asarray(f, float))
    return _ifft(1j * k * fh[..., None])


def partial(cell, f, axis):
    """Spectral partial derivative of a scalar field along a grid axis."""
    k = wavevectors(cell)[..., axis]
    return _ifft(1j * k * _fft(np.asarray(f, float)))


def div_vector(cell, v):
    k = wavevectors(cell)
    vh = _fft(np.asarray(v, float))
    return _ifft(1j * np.einsum("...i,...i->...", k, vh))


def curl_vector(cell, v):
    """Right-handed spectral curl of a vector field."""
    k = wavevectors(cell)
    vh = _fft(np.asarray(v, float))
    out = np.empty_like(vh)
    out[..., 0] = 1j * (k[..., 1] * vh[..., 2] - k[..., 2] * vh[..., 1])
    out[..., 1] = 1j * (k[..., 2] * vh[..., 0] - k[..., 0] * vh[..., 2])
    out[..., 2] = 1j * (k[..., 0] * vh[..., 1] - k[..., 1] * vh[..., 0])
    return _ifft(out)


def inverse_curl(cell, v):
    """A periodic field h with curl(h) = v, for solenoidal mean-free v.

    Uses h_hat = i k x v_hat / |k|^2; the k = 0 mode of h is zero.
    """
    k = wavevectors(cell)
    k2 = np.einsum("...i,...i->...", k, k)
    inv = np.zeros_like(k2)
    np.divide(1.0, k2, out=inv, where=k2 > 0.0)
    vh = _fft(np.asarray(v, float))
    cr = np.empty_like(vh)
    cr[..., 0] = k[..., 1] * vh[..., 2] - k[..., 2] * vh[..., 1]
    cr[..., 1] = k[..., 2] * vh[..., 0] - k[..., 0] * vh[..., 2]
    cr[..., 2] = k[..., 0] * vh[..., 1] - k[..., 1] * vh[..., 0]
    return _ifft(1j * cr * inv[..., None])


def solenoidal_project(cell, v):
    """Remove the compressive (gradient) part of a vector field."""
    k = wavevectors(cell)
    k2 = np.einsum("...i,...i->...", k, k)
    inv = np.zeros_like(k2)
    np.divide(1.0, k2, out=inv, where=k2 > 0.0)
    vh = _fft(np.asarray(v, float))
    kv = np.einsum("...i,...i->...", k, vh)
    vh -= k * (kv * inv)[..., None]
    return _ifft(vh)


def divergence_residual(cell, field):
    """Relative spectral divergence of a vector or tensor field.

    Returns ||k . f_hat|| / ||, |k| |f_hat| ||, computed over all modes and
    components; 0 for fields with no fluctuation.  For a tensor field the
    divergence is taken over the second index (rows are force components).
    """
    f = np.asarray(field, float)
    k = wavevectors(cell)
    fh = _fft(f)
    if f.ndim == 4:  # vector
        num = np.einsum("...i,...i->...", k, fh)
        num2 = np.abs(num) ** 2
    elif f.ndim == 5:  # tensor, contract second index
        num = np.einsum("...j,...ij->...i", k, fh)
        num2 = np.sum(np.abs(num) ** 2, axis=-1)
    else:
        raise DislosimError("divergence_residual expects a vector or tensor field")
    k2 = np.einsum("...i,...i->...", k, k)
    comp2 = np.sum(np.abs(fh.reshape(fh.shape[:3] + (-1,))) ** 2, axis=-1)
    den2 = k2 * comp2
    den = np.sqrt(den2.sum())
    if den == 0.0:
        return 0.0
    return float(np.sqrt(num2.sum()) / den)


def cell_integral(cell, f):
    """Integral over the periodic cell (trapezoid = exact mean x volume)."""
    f = np.asarray(f, float)
    return float(f.mean(axis=(0, 1, 2)) * cell.volume) if f.ndim == 3 else \
        f.mean(axis=(0, 1, 2)) * cell.volume
