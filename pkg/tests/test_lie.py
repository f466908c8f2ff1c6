import math

import numpy as np
import pytest

from rtiform.errors import NearPiSingularity, NotSkew
from rtiform.lie import (Pose, Twist, adjoint, compose, exp_se3, exp_so3, hat3,
                         inverse, log_se3, log_so3, project_rotation,
                         quaternion_from_rotation, rotation_drift, vee3)


def random_twist(rng, max_angle=math.pi - 0.05, max_speed=10.0):
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    w = axis * rng.uniform(0.0, max_angle)
    v = rng.uniform(-max_speed, max_speed, size=3)
    return Twist(w, v)


def random_pose(rng):
    return exp_se3(random_twist(rng))


def test_hat_vee_roundtrip():
    rng = np.random.default_rng(7)
    for _ in range(200):
        w = rng.normal(size=3)
        np.testing.assert_allclose(vee3(hat3(w)), w)
    np.testing.assert_array_equal(hat3((0.0, 0.0, 0.0)), np.zeros((3, 3)))
    np.testing.assert_allclose(vee3(hat3((0.1, -0.2, 0.3))), (0.1, -0.2, 0.3))


def test_hat_is_cross_product():
    rng = np.random.default_rng(8)
    for _ in range(200):
        a, b = rng.normal(size=3), rng.normal(size=3)
        np.testing.assert_allclose(hat3(a) @ b, np.cross(a, b), atol=1e-14)


def test_vee_rejects_symmetric_input():
    with pytest.raises(NotSkew):
        vee3(np.eye(3))


def test_exp_so3_quarter_turn_moves_e1_to_e2():
    R = exp_so3(np.array([0.0, 0.0, math.pi / 2]))
    np.testing.assert_allclose(R @ np.array([1.0, 0.0, 0.0]), [0.0, 1.0, 0.0],
                               atol=1e-15)


def test_exp_so3_half_turn_about_x():
    np.testing.assert_allclose(exp_so3(np.array([math.pi, 0.0, 0.0])),
                               np.diag([1.0, -1.0, -1.0]), atol=1e-15)


def test_exp_so3_is_rotation():
    rng = np.random.default_rng(9)
    for _ in range(200):
        R = exp_so3(rng.uniform(-3.0, 3.0, size=3))
        np.testing.assert_allclose(R @ R.T, np.eye(3), atol=1e-13)
        assert abs(np.linalg.det(R) - 1.0) < 1e-12


def test_log_so3_roundtrip():
    np.testing.assert_allclose(log_so3(np.eye(3)), np.zeros(3))
    np.testing.assert_allclose(log_so3(exp_so3(np.array([0.3, -0.1, 0.7]))),
                               [0.3, -0.1, 0.7], atol=1e-9)


def test_log_so3_small_angles_stay_accurate():
    rng = np.random.default_rng(10)
    for scale in (1e-3, 1e-6, 1e-9, 1e-12):
        for _ in range(50):
            w = rng.normal(size=3)
            w *= scale / np.linalg.norm(w)
            assert np.linalg.norm(log_so3(exp_so3(w)) - w) < 1e-15 + 1e-6 * scale


def test_log_so3_near_pi_raises():
    with pytest.raises(NearPiSingularity):
        log_so3(np.diag([1.0, -1.0, -1.0]))


def test_exp_se3_pure_translation():
    g = exp_se3(Twist(np.zeros(3), np.array([1.0, 2.0, 3.0])))
    np.testing.assert_allclose(g.rotation, np.eye(3))
    np.testing.assert_allclose(g.position, [1.0, 2.0, 3.0])


def test_exp_se3_quarter_turn_arc():
    # turn rate pi/2 with unit forward speed sweeps a quarter circle of
    # radius 2/pi
    g = exp_se3(Twist(np.array([0.0, 0.0, math.pi / 2]), np.array([1.0, 0.0, 0.0])))
    np.testing.assert_allclose(g.position, np.array([2 / math.pi, 2 / math.pi, 0.0]),
                               atol=1e-14)
    np.testing.assert_allclose(g.rotation, exp_so3(np.array([0.0, 0.0, math.pi / 2])),
                               atol=1e-14)


def test_log_se3_translation_only():
    assert np.linalg.norm(log_se3(Pose.identity()).as_vector()) == 0.0
    xi = log_se3(Pose(np.eye(3), np.array([0.5, -1.0, 2.0])))
    np.testing.assert_allclose(xi.angular, np.zeros(3))
    np.testing.assert_allclose(xi.linear, [0.5, -1.0, 2.0])


def test_exp_log_se3_roundtrip():
    rng = np.random.default_rng(11)
    for _ in range(2000):
        xi = random_twist(rng)
        back = log_se3(exp_se3(xi))
        assert np.linalg.norm(back.as_vector() - xi.as_vector()) <= 1e-9


def test_adjoint_translation_form():
    p = np.array([1.0, -2.0, 0.5])
    w = np.array([0.2, 0.3, -0.1])
    v = np.array([4.0, 0.0, 1.0])
    out = adjoint(Pose(np.eye(3), p), Twist(w, v))
    np.testing.assert_allclose(out.angular, w)
    np.testing.assert_allclose(out.linear, np.cross(p, w) + v)


def test_adjoint_matches_matrix_conjugation():
    rng = np.random.default_rng(12)
    for _ in range(500):
        g = random_pose(rng)
        xi = random_twist(rng)
        lhs = adjoint(g, xi).matrix()
        rhs = g.matrix() @ xi.matrix() @ inverse(g).matrix()
        assert np.abs(lhs - rhs).max() <= 1e-12 * max(1.0, np.abs(rhs).max())


def test_compose_and_inverse():
    rng = np.random.default_rng(13)
    for _ in range(200):
        a, b = random_pose(rng), random_pose(rng)
        np.testing.assert_allclose(compose(a, b).matrix(), a.matrix() @ b.matrix(),
                                   atol=1e-12)
        ident = compose(a, inverse(a))
        np.testing.assert_allclose(ident.rotation, np.eye(3), atol=1e-13)
        np.testing.assert_allclose(ident.position, np.zeros(3), atol=1e-12)


def test_pose_matrix_roundtrip():
    rng = np.random.default_rng(14)
    g = random_pose(rng)
    h = Pose.from_matrix(g.matrix())
    np.testing.assert_allclose(h.rotation, g.rotation)
    np.testing.assert_allclose(h.position, g.position)


def test_twist_vector_roundtrip_and_scaling():
    xi = Twist.from_vector([0.1, 0.2, 0.3, 1.0, 2.0, 3.0])
    np.testing.assert_allclose(xi.as_vector(), [0.1, 0.2, 0.3, 1.0, 2.0, 3.0])
    np.testing.assert_allclose(xi.scaled(2.0).as_vector(),
                               [0.2, 0.4, 0.6, 2.0, 4.0, 6.0])


def test_project_rotation_repairs_drift():
    rng = np.random.default_rng(15)
    R = exp_so3(rng.normal(size=3))
    noisy = R + 1e-8 * rng.normal(size=(3, 3))
    assert rotation_drift(noisy) > 0.0
    fixed = project_rotation(noisy)
    assert rotation_drift(fixed) < 1e-14
    assert np.abs(fixed - R).max() < 1e-7


def test_quaternion_unit_norm_positive_scalar():
    rng = np.random.default_rng(16)
    for _ in range(500):
        q = quaternion_from_rotation(exp_so3(rng.uniform(-3.1, 3.1, size=3)))
        assert abs(np.linalg.norm(q) - 1.0) < 1e-12
        assert q[0] >= 0.0


def test_quaternion_reconstructs_rotation():
    rng = np.random.default_rng(17)
    for _ in range(200):
        R = exp_so3(rng.uniform(-3.1, 3.1, size=3))
        w, x, y, z = quaternion_from_rotation(R)
        back = np.array([
            [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
            [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
            [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
        ])
        np.testing.assert_allclose(back, R, atol=1e-12)
