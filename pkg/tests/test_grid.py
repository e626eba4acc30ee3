import numpy as np
import pytest

from dislosim.errors import DislosimError
from dislosim.grid import (PeriodicCell, cell_integral, curl_vector,
                           div_vector, divergence_residual, grad_scalar,
                           inverse_curl, solenoidal_project)


@pytest.fixture
def cell():
    return PeriodicCell((1.0, 2.0, 0.5), (16, 32, 8))


def test_rejects_odd_or_small_resolution():
    with pytest.raises(DislosimError):
        PeriodicCell((1.0, 1.0, 1.0), (15, 16, 16))
    with pytest.raises(DislosimError):
        PeriodicCell((1.0, 1.0, 1.0), (16, 16, 4))


def test_grad_of_harmonic_is_exact(cell):
    x = cell.coords()
    f = np.sin(2 * np.pi * x[..., 0]) * np.cos(2 * np.pi * x[..., 1])
    g = grad_scalar(cell, f)
    expected0 = 2 * np.pi * np.cos(2 * np.pi * x[..., 0]) * np.cos(2 * np.pi * x[..., 1])
    np.testing.assert_allclose(g[..., 0], expected0, atol=1e-12)
    np.testing.assert_allclose(g[..., 2], 0.0, atol=1e-13)


def test_div_of_curl_vanishes(cell):
    rng = np.random.default_rng(1)
    v = rng.standard_normal(cell.shape + (3,))
    w = curl_vector(cell, v)
    assert np.abs(div_vector(cell, w)).max() < 1e-10 * np.abs(w).max()


def test_curl_of_grad_vanishes(cell):
    x = cell.coords()
    f = np.cos(2 * np.pi * x[..., 0]) + np.sin(4 * np.pi * x[..., 2])
    c = curl_vector(cell, grad_scalar(cell, f))
    assert np.abs(c).max() < 1e-11


def test_inverse_curl_round_trip(cell):
    # a curl is solenoidal, mean free, and band limited, so it is exactly
    # representable and the potential reconstruction must round trip
    rng = np.random.default_rng(2)
    v = curl_vector(cell, rng.standard_normal(cell.shape + (3,)))
    h = inverse_curl(cell, v)
    np.testing.assert_allclose(curl_vector(cell, h), v, atol=1e-10)


def test_solenoidal_project_is_idempotent(cell):
    rng = np.random.default_rng(3)
    v = rng.standard_normal(cell.shape + (3,))
    p = solenoidal_project(cell, v)
    assert divergence_residual(cell, p) < 1e-12
    np.testing.assert_allclose(solenoidal_project(cell, p), p, atol=1e-12)


def test_divergence_residual_tensor(cell):
    # a constant tensor field has no fluctuation, hence zero residual
    t = np.broadcast_to(np.eye(3), cell.shape + (3, 3)).copy()
    assert divergence_residual(cell, t) == 0.0
    # a rank-one gradient field is maximally non-solenoidal
    x = cell.coords()
    t = t + np.sin(2 * np.pi * x[..., 0])[..., None, None] * np.outer(
        [1, 0, 0], [1, 0, 0])
    assert divergence_residual(cell, t) == pytest.approx(1.0)


def test_cell_integral(cell):
    x = cell.coords()
    f = np.sin(2 * np.pi * x[..., 0]) ** 2
    assert cell_integral(cell, f) == pytest.approx(0.5 * cell.volume, rel=1e-12)
