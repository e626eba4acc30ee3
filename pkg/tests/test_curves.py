import numpy as np
import pytest

from dislosim.curves import (CurveState, RemeshParams, enclosed_radius,
                             max_stable_dt, nodal_velocity,
                             plane_confinement_residual, remesh, step,
                             step_dissipation, uniform_stress)
from dislosim.errors import CflError, ScrewSingularityError
from dislosim.measures import DislocationCurve, circle_loop
from dislosim.mobility import MobilityLaw

LAW = MobilityLaw(1.0, 1.0)
G = np.array([0.0, 0.0, 1.0])


def shear_stress(sigma):
    """Uniform stress with resolved component g.(T b) = sigma for b = e1."""
    t = np.zeros((3, 3))
    t[0, 2] = t[2, 0] = sigma
    return uniform_stress(t)


def make_loop(radius, n, sigma=0.3):
    b = np.array([1.0, 0.0, 0.0])
    loop = circle_loop(radius, n, (0.0, 0.0, 0.0), b)
    return CurveState(loop, 0.0), shear_stress(sigma)


def run_to(state, stress, t_end, dt):
    while state.time < t_end - 1e-14:
        dt_k = min(dt, t_end - state.time, max_stable_dt(state, stress, LAW))
        state = step(state, stress, LAW, dt_k)
    return state


def test_nodal_velocity_is_radial_for_loop():
    state, stress = make_loop(0.5, 64, sigma=0.3)
    v = nodal_velocity(state, stress, LAW)
    for x, vi in zip(state.curve.vertices, v):
        r_hat = x / np.linalg.norm(x)
        assert np.linalg.norm(vi) == pytest.approx(0.3, rel=1e-12)
        np.testing.assert_allclose(vi, 0.3 * r_hat, atol=1e-12)


def test_expanding_circle_matches_linear_oracle():
    state, stress = make_loop(0.5, 128, sigma=0.3)
    state = run_to(state, stress, 0.5, 1e-3)
    assert enclosed_radius(state.curve) == pytest.approx(0.5 + 0.3 * 0.5,
                                                         rel=1e-3)


def test_shrinking_circle_second_order_convergence():
    r0, c = 0.5, 0.4
    t_end = 0.5 * r0 / c

    def final_radius_error(n, dt):
        state, stress = make_loop(r0, n, sigma=-c)
        state = run_to(state, stress, t_end, dt)
        return abs(enclosed_radius(state.curve) - (r0 - c * t_end))

    e1 = final_radius_error(128, 2e-3)
    e2 = final_radius_error(256, 1e-3)
    assert e1 / e2 == pytest.approx(4.0, rel=0.3)
    assert e1 < 0.005 * r0


def test_planar_confinement():
    state, stress = make_loop(0.4, 96, sigma=0.25)
    state = run_to(state, stress, 0.3, 1e-3)
    assert plane_confinement_residual(state, G, 0.0) <= 1e-10


def test_cfl_violation_raises():
    state, stress = make_loop(0.5, 32, sigma=1.0)
    with pytest.raises(CflError):
        step(state, stress, LAW, 1.0)


def test_max_stable_dt_is_usable():
    state, stress = make_loop(0.5, 32, sigma=1.0)
    dt = max_stable_dt(state, stress, LAW)
    step(state, stress, LAW, dt)  # no error


def test_screw_node_raises_with_index():
    b = np.array([0.0, 1.0, 0.0])
    # the node at (0, 0.5, 0) sits between two collinear segments, so its
    # averaged tangent is exactly parallel to b (pure screw orientation)
    v = np.array([[0.0, 0, 0], [0, 0.5, 0], [0, 1.0, 0],
                  [1.0, 1.0, 0], [1.0, 0, 0]])
    curve = DislocationCurve(v, b)
    t = np.zeros((3, 3))
    t[1, 2] = t[2, 1] = 0.5
    with pytest.raises(ScrewSingularityError, match="node"):
        nodal_velocity(CurveState(curve, 0.0), uniform_stress(t), LAW)


class TestRemesh:
    def test_split_long_segments(self):
        loop = circle_loop(0.5, 8, (0, 0, 0), (1.0, 0, 0))
        params = RemeshParams(h_max=0.1)
        out = remesh(loop, params)
        assert out.n_segments() > 8
        assert out.segment_lengths().max() <= 0.1 + 1e-12

    def test_merge_short_segments(self):
        loop = circle_loop(0.5, 512, (0, 0, 0), (1.0, 0, 0))
        params = RemeshParams(h_max=0.15)
        out = remesh(loop, params)
        assert out.n_segments() < 512
        assert out.segment_lengths().min() >= params.h_min - 1e-12

    def test_length_roughly_preserved(self):
        loop = circle_loop(0.5, 64, (0, 0, 0), (1.0, 0, 0))
        out = remesh(loop, RemeshParams(h_max=0.02))
        assert out.length() == pytest.approx(loop.length(), rel=1e-3)

    def test_step_with_remesh_keeps_expansion_oracle(self):
        state, stress = make_loop(0.3, 64, sigma=0.5)
        params = RemeshParams(h_max=0.06)
        while state.time < 0.4 - 1e-14:
            dt = min(1e-3, 0.4 - state.time,
                     max_stable_dt(state, stress, LAW))
            state = step(state, stress, LAW, dt, remesh_params=params)
        assert enclosed_radius(state.curve) == pytest.approx(
            0.3 + 0.5 * 0.4, rel=2e-3)
        assert state.curve.segment_lengths().max() <= 0.06 + 1e-12


def test_dissipation_nonnegative_for_driven_loop():
    rng = np.random.default_rng(6)
    for _ in range(50):
        b = rng.standard_normal(3)
        loop = circle_loop(rng.uniform(0.2, 0.8), 64,
                           rng.standard_normal(3), b)
        t = rng.standard_normal((3, 3))
        t = 0.5 * (t + t.T)
        d = step_dissipation(CurveState(loop, 0.0), uniform_stress(t),
                             MobilityLaw(1.0, 2.0))
        assert d >= -1e-10


def test_enclosed_radius_of_regular_polygon():
    # radius from the enclosed area: sqrt(area / pi)
    loop = circle_loop(1.0, 6, (0, 0, 0), (1.0, 0, 0))
    area = 0.5 * 6 * np.sin(2 * np.pi / 6)
    assert enclosed_radius(loop) == pytest.approx(np.sqrt(area / np.pi),
                                                  rel=1e-12)
