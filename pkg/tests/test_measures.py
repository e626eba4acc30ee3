import numpy as np
import pytest

from dislosim.errors import DislosimError
from dislosim.grid import PeriodicCell, curl_vector, inverse_curl
from dislosim.measures import (DensityGrid, DislocationCurve, circle_loop,
                               curl_consistency, pair_tensor, pair_vector,
                               pair_vector_grid, polynomial_bump, rasterize,
                               tensor_bump, vector_bump)


def rotational_field(center):
    """phi(x) = (-(x2-c2), x1-c1, 0): tau . phi = R on a centered circle."""
    c = np.asarray(center, float)

    def phi(x):
        return np.stack([-(x[..., 1] - c[1]), x[..., 0] - c[0],
                         np.zeros_like(x[..., 0])], axis=-1)
    return phi


def _polygon_area(vertices):
    cr = np.cross(vertices, np.roll(vertices, -1, axis=0))
    return 0.5 * abs(float(cr.sum(axis=0)[2]))


def test_circle_loop_geometry():
    loop = circle_loop(0.4, 128, (1.0, 2.0, 3.0), (1.0, 0.0, 0.0))
    assert loop.n_segments() == 128
    r = np.linalg.norm(loop.vertices - np.array([1.0, 2.0, 3.0]), axis=1)
    np.testing.assert_allclose(r, 0.4, rtol=1e-12)
    # perimeter of the inscribed polygon
    assert loop.length() == pytest.approx(2 * np.pi * 0.4, rel=1e-3)


def test_curve_requires_distinct_vertices():
    v = np.array([[0.0, 0, 0], [0, 0, 0], [1, 0, 0]])
    with pytest.raises(DislosimError):
        DislocationCurve(v, np.array([1.0, 0, 0]))


def test_pair_vector_circle_oracle():
    # integral of |b| tau . phi over a circle of radius R with the
    # rotational field equals |b| * 2 pi R^2
    R, b = 0.3, np.array([0.5, 0.0, 0.0])
    loop = circle_loop(R, 256, (0, 0, 0), b)
    val = pair_vector(loop, rotational_field((0, 0, 0)))
    # for this linear field the pairing equals |b| * 2 * (polygon area)
    # exactly; the polygon area itself tends to pi R^2
    assert val == pytest.approx(0.5 * 2.0 * _polygon_area(loop.vertices),
                                rel=1e-12)
    assert val == pytest.approx(0.5 * 2 * np.pi * R**2, rel=1e-3)


def test_pair_vector_converges_quadratically():
    R = 0.3
    phi = rotational_field((0, 0, 0))
    oracle = 2 * np.pi * R**2
    errs = [abs(pair_vector(circle_loop(R, n, (0, 0, 0), (1, 0, 0)), phi)
                - oracle) for n in (32, 64, 128)]
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.15)
    assert errs[1] / errs[2] == pytest.approx(4.0, rel=0.15)


def test_pair_tensor_oracle():
    # (b (x) tau) : (e1 (x) phi) = b1 (tau . phi)
    R = 0.25
    b = np.array([2.0, 0.0, 0.0])
    loop = circle_loop(R, 256, (0, 0, 0), b)
    phi = rotational_field((0, 0, 0))

    def phit(x):
        out = np.zeros(x.shape[:-1] + (3, 3))
        out[..., 0, :] = phi(x)
        return out

    val = pair_tensor(loop, phit)
    assert val == pytest.approx(2.0 * 2.0 * _polygon_area(loop.vertices),
                                rel=1e-12)
    assert val == pytest.approx(2.0 * 2 * np.pi * R**2, rel=1e-3)


def test_constant_field_pairs_to_zero_on_closed_loop():
    # the tangent of a closed curve integrates to zero
    loop = circle_loop(0.4, 64, (0, 0, 0), (0, 1, 0))
    phi = lambda x: np.broadcast_to(np.array([0.3, -0.7, 0.2]), x.shape)
    assert pair_vector(loop, phi) == pytest.approx(0.0, abs=1e-13)


def test_bump_supports():
    bump = polynomial_bump((0.5, 0.5, 0.5), 0.2)
    inside = bump(np.array([0.5, 0.5, 0.6]))
    outside = bump(np.array([0.5, 0.5, 0.8]))
    assert inside > 0.0 and outside == 0.0
    vb = vector_bump((0, 0, 0), 1.0, (1.0, 0, 0))
    assert vb(np.zeros(3))[0] > 0
    tb = tensor_bump((0, 0, 0), 1.0, np.eye(3))
    assert tb(np.zeros(3))[0, 0] > 0


class TestRasterize:
    def setup_method(self):
        self.cell = PeriodicCell((1.0, 1.0, 1.0), (32, 32, 32))
        self.b = np.array([0.5, 0.0, 0.0])
        self.loop = circle_loop(0.25, 200, (0.5, 0.5, 0.5), self.b)
        self.rho = rasterize([self.loop], self.cell)

    def test_total_weight_exact(self):
        oracle = np.linalg.norm(self.b) * self.loop.length()
        assert self.rho.total_weight() == pytest.approx(oracle, rel=1e-12)

    def test_solenoidal(self):
        assert self.rho.divergence_residual() <= 1e-8

    def test_pairing_matches_line_integral(self):
        phi = rotational_field((0.5, 0.5, 0.5))
        # localize with a bump so the field is periodic-compatible
        bump = polynomial_bump((0.5, 0.5, 0.5), 0.45)

        def phib(x):
            return bump(x)[..., None] * phi(x)

        on_grid = pair_vector_grid(self.rho, phib)
        on_curve = pair_vector(self.loop, phib)
        assert on_grid == pytest.approx(on_curve, rel=0.05)

    def test_tau_unit_where_defined(self):
        tau = self.rho.tau()
        norms = np.linalg.norm(tau, axis=-1)
        mask = norms > 0
        np.testing.assert_allclose(norms[mask], 1.0, rtol=1e-12)


def test_density_grid_rejects_bad_shapes():
    cell = PeriodicCell((1.0, 1.0, 1.0), (8, 8, 8))
    with pytest.raises(DislosimError):
        DensityGrid(cell, np.zeros((8, 8, 4, 3)))


def test_curl_consistency_of_reconstructed_potential():
    cell = PeriodicCell((1.0, 1.0, 1.0), (32, 32, 32))
    loop = circle_loop(0.2, 128, (0.5, 0.5, 0.5), (0.0, 1.0, 0.0))
    rho = rasterize([loop], cell)
    h = inverse_curl(cell, rho.vector)
    assert curl_consistency(cell, h, rho) < 1e-10
    np.testing.assert_allclose(curl_vector(cell, h), rho.vector, atol=1e-10)
