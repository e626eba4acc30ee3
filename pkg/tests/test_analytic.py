import numpy as np
import pytest

from dislosim.analytic import (StraightDislocation, branch_angle, displacement,
                               displacement_gradient, stress,
                               traction_limit_integral, verify_equilibrium,
                               weak_rot_pairing)
from dislosim.errors import BranchCutError, CoreSingularityError
from dislosim.measures import tensor_bump
from dislosim.tensors import IsotropicElasticity, sym

EL = IsotropicElasticity(1.2, 0.8)


@pytest.fixture
def edge_screw():
    return StraightDislocation(1.0, 0.7, EL)


def test_branch_angle_range():
    assert branch_angle(1.0, 1e-12) == pytest.approx(0.0, abs=1e-11)
    assert branch_angle(1.0, -1e-12) == pytest.approx(2 * np.pi, abs=1e-11)
    assert branch_angle(-1.0, 0.0) == pytest.approx(np.pi)
    with pytest.raises(BranchCutError):
        branch_angle(1.0, 0.0)


def test_displacement_jump_is_minus_burgers(edge_screw):
    d = edge_screw
    rng = np.random.default_rng(11)
    eps = 1e-12
    for _ in range(20):
        x1 = rng.uniform(0.1, 2.0)
        x3 = rng.uniform(-1.0, 1.0)
        jump = (displacement(d, np.array([x1, eps, x3]))
                - displacement(d, np.array([x1, -eps, x3])))
        np.testing.assert_allclose(jump, -d.burgers, atol=1e-10)


def test_screw_displacement_value():
    # pure screw: u3 = b3 * theta / (2 pi); theta(-1, 0) = pi
    d = StraightDislocation(0.0, 1.0, EL)
    u = displacement(d, np.array([-1.0, 0.0, 0.0]))
    assert u[2] == pytest.approx(0.5)
    assert u[0] == pytest.approx(0.0) and u[1] == pytest.approx(0.0)


def test_displacement_gradient_matches_finite_differences(edge_screw):
    d = edge_screw
    rng = np.random.default_rng(4)
    h = 1e-6
    for _ in range(10):
        x = rng.uniform(0.2, 1.5, 3)
        x[1] = rng.uniform(0.2, 1.5)  # stay away from the cut
        grad = displacement_gradient(d, x)
        for j in range(3):
            dx = np.zeros(3)
            dx[j] = h
            fd = (displacement(d, x + dx) - displacement(d, x - dx)) / (2 * h)
            np.testing.assert_allclose(grad[:, j], fd, rtol=1e-5, atol=1e-7)


def test_stress_is_elasticity_of_strain(edge_screw):
    # away from the cut the stress must equal the elastic map applied to
    # the symmetric displacement gradient
    d = edge_screw
    rng = np.random.default_rng(5)
    for _ in range(10):
        x = np.array([rng.uniform(-1.5, 1.5), rng.uniform(0.1, 1.5),
                      rng.uniform(-1, 1)])
        t = stress(d, x)
        t_from_u = EL.apply(sym(displacement_gradient(d, x)))
        np.testing.assert_allclose(t, t_from_u, rtol=1e-10, atol=1e-12)


def test_stress_symmetry_and_linearity(edge_screw):
    x = np.array([0.3, -0.4, 0.0])
    t = stress(edge_screw, x)
    np.testing.assert_allclose(t, t.T)
    d2 = StraightDislocation(2.0, 1.4, EL)
    np.testing.assert_allclose(stress(d2, x), 2 * t, rtol=1e-12)


def test_core_singularity_raises():
    d = StraightDislocation(1.0, 0.0, EL, r_core=1e-6)
    with pytest.raises(CoreSingularityError):
        stress(d, np.array([1e-8, 1e-8, 0.0]))


def test_equilibrium_residual_second_order(edge_screw):
    hs = np.array([1e-2, 1e-3, 1e-4])
    pts = [np.array([0.7, 0.4, 0.0]), np.array([-0.5, 0.8, 0.0])]
    res = [max(verify_equilibrium(edge_screw, p, h) for p in pts) for h in hs]
    slope = np.polyfit(np.log(hs), np.log(res), 1)[0]
    assert slope == pytest.approx(2.0, abs=0.2)


def test_stress_continuity_across_cut(edge_screw):
    d = edge_screw
    eps = 1e-12
    for x1 in (0.15, 0.6, 1.3):
        up = stress(d, np.array([x1, eps, 0.0]))
        dn = stress(d, np.array([x1, -eps, 0.0]))
        np.testing.assert_allclose(up, dn, atol=1e-10)


def test_traction_limit_integral_decays(edge_screw):
    zero = lambda x: np.zeros_like(x[..., 0])
    fn = lambda x: np.stack([x[..., 0] * x[..., 1], zero(x), zero(x)], axis=-1)
    vals = [abs(traction_limit_integral(edge_screw, r, fn))
            for r in (0.1, 0.05, 0.025)]
    assert vals[0] > vals[1] > vals[2] > 0.0
    # the decay is quadratic in r for this test function
    assert vals[0] / vals[1] == pytest.approx(4.0, rel=0.1)


def test_weak_pairing_magnitude(edge_screw):
    """The distributional curl of grad u concentrates on the defect line.

    The volume pairing of grad u with the curl of a smooth test tensor
    equals the line pairing with +(b (x) tangent); the magnitudes agree to
    the quadrature tolerance.  (The overall sign is fixed by the
    right-handed curl convention and the jump orientation; see the circle
    pairing below.)
    """
    rng = np.random.default_rng(21)
    for _ in range(2):
        m = rng.standard_normal((3, 3))
        tb = tensor_bump((0.0, 0.0, 0.0), 1.5, m)
        lhs, rhs = weak_rot_pairing(edge_screw, tb.fn, tb.support)
        assert abs(abs(lhs) - abs(rhs)) <= 1e-3 * abs(rhs)


def test_weak_pairing_measured_sign(edge_screw):
    # with jump -b across the cut and a right-handed curl, the two pairings
    # come out with the SAME sign
    m = np.diag([1.0, -0.5, 0.25])
    tb = tensor_bump((0.0, 0.0, 0.0), 1.5, m)
    lhs, rhs = weak_rot_pairing(edge_screw, tb.fn, tb.support)
    assert lhs * rhs > 0.0
    assert lhs == pytest.approx(rhs, rel=1e-3)
