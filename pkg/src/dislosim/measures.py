"""Discrete dislocation measures: polyline curves, pairings, grid densities.

A dislocation curve is a polyline carrying a Burgers vector; it represents
the line measure with density |b| and tangent weight tau.  Pairings with
smooth test functions integrate along the polyline by Gauss quadrature.
``rasterize`` deposits curves onto a periodic grid with cloud-in-cell
weights, then removes the (small) compressive part of the deposited vector
field so the grid density is exactly solenoidal in the spectral sense, as
a curl field must be.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DislosimError
from .grid import PeriodicCell, curl_vector, divergence_residual, solenoidal_project

MIN_SEGMENT_LENGTH = 1e-9


@dataclass
class DislocationCurve:
    """Closed (or cell-crossing) polyline with a Burgers vector."""

    vertices: np.ndarray
    burgers: np.ndarray
    closed: bool = True

    def __post_init__(self):
        self.vertices = np.atleast_2d(np.asarray(self.vertices, float))
        self.burgers = np.asarray(self.burgers, float)
        if self.vertices.shape[1] != 3:
            raise DislosimError("curve vertices must be 3-vectors")
        if np.linalg.norm(self.burgers) <= 0.0:
            raise DislosimError("Burgers vector must be nonzero")
        if self.closed and len(self.vertices) < 3:
            raise DislosimError("a closed curve needs at least 3 vertices")
        if len(self.vertices) < 2:
            raise DislosimError("a curve needs at least 2 vertices")
        if np.any(self.segment_lengths() <= MIN_SEGMENT_LENGTH):
            raise DislosimError(
                f"consecutive vertices closer than {MIN_SEGMENT_LENGTH:g}"
            )

    def segments(self):
        """Per-segment displacement vectors."""
        v = self.vertices
        if self.closed:
            return np.roll(v, -1, axis=0) - v
        return v[1:] - v[:-1]

    def segment_lengths(self):
        return np.linalg.norm(self.segments(), axis=1)

    def tangents(self):
        seg = self.segments()
        return seg / np.linalg.norm(seg, axis=1)[:, None]

    def length(self):
        return float(self.segment_lengths().sum())

    def n_segments(self):
        return len(self.vertices) if self.closed else len(self.vertices) - 1


def circle_loop(radius, n_nodes, center=(0.0, 0.0, 0.0), burgers=(0.0, 1.0, 0.0),
                phase=0.5):
    """Regular polygon approximating a circle in the x1-x2 plane.

    ``phase`` shifts the nodes by that fraction of the angular spacing,
    which keeps nodes off the exact screw orientations for in-plane
    Burgers vectors.
    """
    phi = 2.0 * np.pi * (np.arange(n_nodes) + phase) / n_nodes
    center = np.asarray(center, float)
    verts = center + radius * np.stack(
        [np.cos(phi), np.sin(phi), np.zeros_like(phi)], axis=-1)
    return DislocationCurve(verts, np.asarray(burgers, float))


@dataclass
class TestFunction:
    """Smooth compactly supported test function (vector or tensor valued)."""

    fn: callable
    support: tuple  # ((x1min, x1max), (x2min, x2max), (x3min, x3max))

    def __call__(self, x):
        return self.fn(x)


def polynomial_bump(center, radius, power=4):
    """Scalar bump ((1 - |x-c|^2/R^2)_+)^power, C^(power-1) and compact."""
    center = np.asarray(center, float)

    def bump(x):
        d2 = np.sum((np.asarray(x, float) - center) ** 2, axis=-1) / radius**2
        return np.clip(1.0 - d2, 0.0, None) ** power

    return bump


def vector_bump(center, radius, direction, power=4):
    direction = np.asarray(direction, float)
    scalar = polynomial_bump(center, radius, power)
    support = tuple((c - radius, c + radius) for c in np.asarray(center, float))
    return TestFunction(lambda x: scalar(x)[..., None] * direction, support)


def tensor_bump(center, radius, matrix, power=4):
    matrix = np.asarray(matrix, float)
    scalar = polynomial_bump(center, radius, power)
    support = tuple((c - radius, c + radius) for c in np.asarray(center, float))
    return TestFunction(lambda x: scalar(x)[..., None, None] * matrix, support)


def _gauss_points_on_segments(curve, order):
    q, w = np.polynomial.legendre.leggauss(order)
    starts = curve.vertices if curve.closed else curve.vertices[:-1]
    seg = curve.segments()
    lengths = np.linalg.norm(seg, axis=1)
    # points: (n_seg, order, 3); weights include the segment length
    t = 0.5 * (q + 1.0)
    pts = starts[:, None, :] + t[None, :, None] * seg[:, None, :]
    wts = 0.5 * lengths[:, None] * w[None, :]
    taus = seg / lengths[:, None]
    return pts, wts, taus


def pair_vector(curve: DislocationCurve, phi, order=4):
    """Pairing |b| * integral over the curve of tau . phi ds."""
    pts, wts, taus = _gauss_points_on_segments(curve, order)
    vals = np.asarray(phi(pts), float)
    integrand = np.einsum("si,spi->sp", taus, vals)
    return float(np.linalg.norm(curve.burgers) * np.sum(integrand * wts))


def pair_tensor(curve: DislocationCurve, phit, order=4):
    """Pairing integral over the curve of (b (x) tau) : phit ds."""
    pts, wts, taus = _gauss_points_on_segments(curve, order)
    vals = np.asarray(phit(pts), float)
    nye = curve.burgers[None, :, None] * taus[:, None, :]  # (n_seg, 3, 3)
    integrand = np.einsum("sij,spij->sp", nye, vals)
    return float(np.sum(integrand * wts))


@dataclass
class DensityGrid:
    """Gridded vector dislocation density on a periodic cell.

    ``vector`` is the tau-weighted density per unit volume (solenoidal to
    spectral accuracy); ``weight`` is the scalar line density |rho| per
    unit volume.  ``tau`` is defined wherever ``weight > 0``.
    """

    cell: PeriodicCell
    vector: np.ndarray
    weight: np.ndarray = None

    def __post_init__(self):
        self.vector = np.asarray(self.vector, float)
        if self.vector.shape != self.cell.shape + (3,):
            raise DislosimError("density vector field shape does not match cell")
        if self.weight is None:
            self.weight = np.linalg.norm(self.vector, axis=-1)
        else:
            self.weight = np.asarray(self.weight, float)
            if np.any(self.weight < 0.0):
                raise DislosimError("density weights must be nonnegative")

    def tau(self):
        norm = np.linalg.norm(self.vector, axis=-1)
        tau = np.zeros_like(self.vector)
        np.divide(self.vector, norm[..., None], out=tau, where=norm[..., None] > 0.0)
        return tau

    def total_weight(self):
        """Cell integral of the scalar density (total |b| x line length)."""
        return float(self.weight.sum() * self.cell.node_volume)

    def divergence_residual(self):
        return divergence_residual(self.cell, self.vector)


def rasterize(curves, cell: PeriodicCell, chunks_per_cell=4):
    """Deposit curves onto the grid with periodic cloud-in-cell weights.

    Each segment is subdivided so no chunk is longer than a fraction of a
    grid spacing, and each chunk deposits |b| * ds * tau at its midpoint.
    The deposited vector field is then projected onto its solenoidal part.
    The scalar weight channel keeps the raw |b| * ds deposits, so the total
    weight equals |b| times the curve length exactly.
    """
    if isinstance(curves, DislocationCurve):
        curves = [curves]
    n1, n2, n3 = cell.shape
    h = np.array(cell.spacing)
    vec = np.zeros((n1, n2, n3, 3))
    wgt = np.zeros((n1, n2, n3))
    max_chunk = h.min() / chunks_per_cell

    for curve in curves:
        bmag = np.linalg.norm(curve.burgers)
        starts = curve.vertices if curve.closed else curve.vertices[:-1]
        for start, seg in zip(starts, curve.segments()):
            length = np.linalg.norm(seg)
            if length <= MIN_SEGMENT_LENGTH:
                warnings.warn("skipping degenerate curve segment")
                continue
            m = max(1, int(np.ceil(length / max_chunk)))
            t = (np.arange(m) + 0.5) / m
            mids = start[None, :] + t[:, None] * seg[None, :]
            ds = length / m
            tau = seg / length
            _deposit_cic(vec, wgt, mids, bmag * ds, tau, cell)

    dens = 1.0 / cell.node_volume
    vec = solenoidal_project(cell, vec * dens)
    return DensityGrid(cell, vec, wgt * dens)


def _deposit_cic(vec, wgt, points, amount, tau, cell):
    """Trilinear deposit of amount*tau (and scalar amount) at each point."""
    h = np.array(cell.spacing)
    n = np.array(cell.shape)
    u = np.asarray(points) / h  # grid coordinates
    i0 = np.floor(u).astype(int)
    frac = u - i0
    for corner in range(8):
        off = np.array([(corner >> 2) & 1, (corner >> 1) & 1, corner & 1])
        w = np.prod(np.where(off == 1, frac, 1.0 - frac), axis=1)
        idx = (i0 + off) % n
        np.add.at(wgt, (idx[:, 0], idx[:, 1], idx[:, 2]), amount * w)
        np.add.at(vec, (idx[:, 0], idx[:, 1], idx[:, 2]),
                  (amount * w)[:, None] * tau[None, :])


def pair_vector_grid(rho: DensityGrid, phi):
    """Grid counterpart of ``pair_vector``: node sum of vector . phi."""
    x = rho.cell.coords()
    vals = np.asarray(phi(x), float)
    return float(np.einsum("...i,...i->...", rho.vector, vals).sum()
                 * rho.cell.node_volume)


def curl_consistency(cell: PeriodicCell, h_field, rho: DensityGrid):
    """Relative L2 mismatch between the spectral curl of h and rho's vector."""
    c = curl_vector(cell, np.asarray(h_field, float))
    diff = np.linalg.norm(c - rho.vector)
    scale = np.linalg.norm(rho.vector)
    if scale == 0.0:
        return float(np.linalg.norm(c))
    return float(diff / scale)
