import math

import numpy as np
import pytest

from rtiform.controller import (ControlGains, alignment_rates, follower_control,
                                tracking_error, tracking_twist, virtual_leader)
from rtiform.errors import HoverRequired, NearPiSingularity
from rtiform.feasibility import (RTI, FormationSpec, VelocityLimits,
                                 maintenance_velocity, synthesize_spec)
from rtiform.lie import (Pose, Twist, compose, exp_se3, exp_so3, inverse, log_se3)
from rtiform.uav import EulerAngles

GAINS = ControlGains()
IDENT_SPEC = FormationSpec(np.zeros(3), EulerAngles(0.0, 0.0, 0.0), RTI)


def random_pose(rng, scale=0.5):
    return exp_se3(Twist(rng.normal(size=3) * scale, rng.normal(size=3)))


def random_cruise(rng):
    return Twist(rng.uniform(-0.5, 0.5, size=3),
                 np.array([rng.uniform(1.0, 10.0), 0.0, 0.0]))


def test_virtual_leader_identity_spec():
    rng = np.random.default_rng(50)
    g, xi = random_pose(rng), random_cruise(rng)
    vg, vxi = virtual_leader(g, xi, IDENT_SPEC)
    np.testing.assert_allclose(vg.matrix(), g.matrix())
    np.testing.assert_allclose(vxi.as_vector(), xi.as_vector())


def test_virtual_leader_pure_offset():
    rng = np.random.default_rng(51)
    g = random_pose(rng)
    xi = Twist(np.zeros(3), np.array([5.0, 0.0, 0.0]))
    spec = FormationSpec(np.array([0.0, -3.0, 1.0]), EulerAngles(0.0, 0.0, 0.0), RTI)
    vg, vxi = virtual_leader(g, xi, spec)
    np.testing.assert_allclose(vg.position, g.position + g.rotation @ spec.offset)
    np.testing.assert_allclose(vxi.as_vector(), xi.as_vector())


def test_tracking_error_zero_on_target():
    rng = np.random.default_rng(52)
    g = random_pose(rng)
    assert np.linalg.norm(tracking_error(g, g)) == 0.0


def test_tracking_error_world_offset_norm():
    rng = np.random.default_rng(53)
    g = random_pose(rng)
    d = rng.normal(size=3)
    follower = Pose(g.rotation, g.position + d)
    err = tracking_error(g, follower)
    np.testing.assert_allclose(err[:3], np.zeros(3))
    assert abs(np.linalg.norm(err[3:]) - np.linalg.norm(d)) < 1e-12


def test_tracking_twist_forward_offset_example():
    leader = Pose.identity()
    still = Twist.zero()
    for d in (0.5, 2.0):
        xi = tracking_twist(leader, still, Pose(np.eye(3), np.array([d, 0.0, 0.0])),
                            IDENT_SPEC, ControlGains(tracking=1.5))
        np.testing.assert_allclose(xi.angular, np.zeros(3))
        np.testing.assert_allclose(xi.linear, [-1.5 * d, 0.0, 0.0])


def test_tracking_twist_matches_homogeneous_oracle():
    rng = np.random.default_rng(54)
    for _ in range(300):
        leader = random_pose(rng)
        follower = random_pose(rng)
        xi_l = random_cruise(rng)
        spec = FormationSpec(rng.normal(size=3),
                             EulerAngles(*rng.uniform(-0.5, 0.5, size=3)), RTI)
        kp = rng.uniform(0.5, 3.0)
        out = tracking_twist(leader, xi_l, follower, spec, ControlGains(tracking=kp))

        G = np.linalg.inv(leader.matrix()) @ follower.matrix()
        err = log_se3(Pose.from_matrix(np.linalg.inv(spec.pose.matrix()) @ G))
        ff = np.linalg.inv(G) @ xi_l.matrix() @ G
        oracle = -kp * err.matrix() + ff
        assert np.abs(out.matrix() - oracle).max() <= 1e-12 * max(1.0, np.abs(oracle).max())


def test_tracking_twist_zero_error_is_maintenance():
    rng = np.random.default_rng(55)
    for _ in range(200):
        leader = random_pose(rng)
        xi_l = random_cruise(rng)
        try:
            spec = synthesize_spec(xi_l, rng.uniform(-5, 5, size=3))
        except HoverRequired:
            continue
        follower = compose(leader, spec.pose)
        out = tracking_twist(leader, xi_l, follower, spec, GAINS)
        want = maintenance_velocity(spec, xi_l)
        assert np.abs(out.as_vector() - want.as_vector()).max() <= 1e-12


def test_alignment_rates_examples():
    np.testing.assert_array_equal(alignment_rates((5.0, 0.0, 0.0)), np.zeros(3))
    np.testing.assert_array_equal(alignment_rates((0.0, 0.0, 0.0)), np.zeros(3))
    np.testing.assert_allclose(alignment_rates((1.0, 1.0, 0.0)),
                               [0.0, 0.0, math.pi / 4], atol=1e-15)
    np.testing.assert_allclose(alignment_rates((1.0, 0.0, 1.0)),
                               [0.0, -math.pi / 4, 0.0], atol=1e-15)


def test_alignment_reduces_misalignment():
    # every forward-pointing command direction gets strictly closer to the nose
    e1 = np.array([1.0, 0.0, 0.0])
    for psi in np.linspace(-1.2, 1.2, 9):
        for theta in np.linspace(-1.2, 1.2, 9):
            lam = np.array([math.cos(psi) * math.cos(theta),
                            math.sin(psi), math.sin(theta)])
            if np.allclose(lam, e1):
                continue
            rates = alignment_rates(lam)
            turned = exp_so3([0.0, rates[1], 0.0]) @ exp_so3([0.0, 0.0, rates[2]]) @ e1
            before = math.acos(np.clip(lam @ e1 / np.linalg.norm(lam), -1, 1))
            after = math.acos(np.clip(lam @ turned / np.linalg.norm(lam), -1, 1))
            assert after < before


def test_control_is_nonholonomic_exactly():
    rng = np.random.default_rng(56)
    for _ in range(200):
        cmd = follower_control(random_pose(rng), random_cruise(rng), random_pose(rng),
                               IDENT_SPEC, GAINS)
        assert cmd.twist.linear[1] == 0.0
        assert cmd.twist.linear[2] == 0.0


def test_control_zero_error_consistency():
    rng = np.random.default_rng(57)
    for _ in range(200):
        leader = random_pose(rng)
        xi_l = random_cruise(rng)
        try:
            spec = synthesize_spec(xi_l, rng.uniform(-5, 5, size=3))
        except HoverRequired:
            continue
        follower = compose(leader, spec.pose)
        cmd = follower_control(leader, xi_l, follower, spec, GAINS)
        want = maintenance_velocity(spec, xi_l)
        assert np.abs(cmd.twist.as_vector() - want.as_vector()).max() <= 1e-12
        assert not cmd.behind and not cmd.saturated


def test_control_lateral_offset_regression():
    # leader at rest, follower parked 3 m to its left: pure turn toward it
    cmd = follower_control(Pose.identity(), Twist.zero(),
                           Pose(np.eye(3), np.array([0.0, 3.0, 0.0])),
                           IDENT_SPEC, GAINS)
    np.testing.assert_allclose(cmd.twist.angular, [0.0, 0.0, -math.pi / 2], atol=1e-15)
    np.testing.assert_allclose(cmd.twist.linear, np.zeros(3))
    assert not cmd.behind


def test_control_behind_flag_and_clamp():
    ahead = Pose(np.eye(3), np.array([4.0, 0.0, 0.0]))
    cmd = follower_control(Pose.identity(), Twist.zero(), ahead, IDENT_SPEC, GAINS)
    assert cmd.behind and not cmd.saturated
    assert cmd.twist.linear[0] == -4.0

    limits = VelocityLimits(0.5, 1.0, 8.0)
    cmd = follower_control(Pose.identity(), Twist.zero(), ahead, IDENT_SPEC, GAINS,
                           limits)
    assert cmd.behind and cmd.saturated
    assert cmd.twist.linear[0] == limits.forward_min


def test_control_near_pi_error_raises():
    flipped = Pose(exp_so3(np.array([math.pi, 0.0, 0.0])), np.zeros(3))
    with pytest.raises(NearPiSingularity):
        follower_control(Pose.identity(), Twist.zero(), flipped, IDENT_SPEC, GAINS)
