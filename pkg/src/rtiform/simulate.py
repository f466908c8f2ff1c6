"""Closed-loop swarm simulation.

Each tick the followers are evaluated in topological order against the poses
committed at the end of the previous tick; a parent's command for the current
interval is visible to its children. All poses then step simultaneously by the
exact flow of their commanded twists. There is no randomness anywhere, so two
runs of the same scenario produce byte-identical logs; the optional parallel
mode evaluates one topology layer at a time behind a barrier and commits in
node order, which preserves that guarantee.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .controller import follower_control
from .errors import (GimbalLock, HoverRequired, InfeasibleScenario, NearPiSingularity,
                     OutOfSchedule, SimulationError)
from .feasibility import (P_RTI, FormationSpec, check_saturation, max_offset_norm,
                          maintenance_velocity, synthesize_spec, validate_limit_pairing)
from .lie import Pose, Twist, compose, exp_se3, quaternion_from_rotation
from .scenario import Scenario
from .topology import (ParentSnapshot, convex_pose, convex_twist, layers,
                       topological_order, virtual_parent)
from .uav import euler_to_rotation, rotation_to_euler, step

log = logging.getLogger(__name__)

COLUMNS = ("t", "uav_id", "px", "py", "pz", "qw", "qx", "qy", "qz",
           "wx", "wy", "wz", "vx", "err_norm", "rel_phi", "rel_theta", "rel_psi",
           "sat_flag")
_INT_COLUMNS = (COLUMNS.index("uav_id"), COLUMNS.index("sat_flag"))


@dataclass
class TrajectoryLog:
    """Dense per-(tick, UAV) record of a run; one row per UAV per tick,
    tick-major. Columns are COLUMNS."""

    step: float
    n_uavs: int
    data: np.ndarray

    @property
    def n_ticks(self) -> int:
        return self.data.shape[0] // self.n_uavs

    def times(self) -> np.ndarray:
        return self.data[:: self.n_uavs, 0]

    def for_uav(self, uav: int) -> np.ndarray:
        return self.data[uav :: self.n_uavs]

    def column(self, name: str, uav: int | None = None) -> np.ndarray:
        j = COLUMNS.index(name)
        rows = self.data if uav is None else self.for_uav(uav)
        return rows[:, j]

    def to_csv(self, path) -> None:
        """Write the log; float fields use repr so equal runs give equal bytes."""
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(",".join(COLUMNS) + "\n")
            for row in self.data:
                parts = [
                    str(int(x)) if j in _INT_COLUMNS else repr(float(x))
                    for j, x in enumerate(row)
                ]
                f.write(",".join(parts) + "\n")


def steady_formation(scenario: Scenario, leader_twist: Twist):
    """Nominal on-formation poses, specs and twists for one leader twist,
    propagated down the DAG (children hang off their virtual parents)."""
    topo = scenario.topology()
    order = topological_order(topo)
    n = scenario.n_uavs
    poses: list[Pose] = [Pose.identity()] * n
    twists: list[Twist] = [Twist.zero()] * n
    specs: list[FormationSpec | None] = [None] * n

    lead = scenario.uavs[0]
    R0 = euler_to_rotation(lead.attitude) if lead.attitude is not None else np.eye(3)
    p0 = np.asarray(lead.position, dtype=float) if lead.position is not None else np.zeros(3)
    poses[0] = Pose(R0, p0)
    twists[0] = leader_twist
    kind = scenario.profile.pattern_kind

    for i in order[1:]:
        u = scenario.uavs[i]
        ps = topo.parents[i]
        snap = ParentSnapshot(tuple(poses[p] for p in ps), tuple(twists[p] for p in ps))
        g_vp, xi_vp = virtual_parent(snap, topo.weights[i])
        if u.attitude_override is not None:
            spec = FormationSpec(u.offset, u.attitude_override, kind)
        else:
            spec = synthesize_spec(xi_vp, u.offset, u.roll, kind)
        specs[i] = spec
        poses[i] = compose(g_vp, spec.pose)
        twists[i] = maintenance_velocity(spec, xi_vp)
    return poses, specs, twists


def initial_state(scenario: Scenario):
    """Start-of-run poses: each follower sits on its slot relative to the
    actual (already displaced) poses of its parents, explicit position or
    attitude when given, then its own perturbation. Hanging slots off actual
    parents keeps every follower's initial pose error equal to its configured
    perturbation at any DAG depth."""
    nominal, specs, _ = steady_formation(scenario, scenario.profile.twist_at(0.0))
    topo = scenario.topology()
    out: list[Pose] = list(nominal)
    for i in topological_order(topo):
        u = scenario.uavs[i]
        g = out[0] if i == 0 else None
        if i > 0:
            snap = ParentSnapshot(tuple(out[p] for p in topo.parents[i]), ())
            g_vp = snap.poses[0] if len(snap.poses) == 1 else convex_pose(
                snap.poses, topo.weights[i])
            g = compose(g_vp, specs[i].pose)
        if u.position is not None or u.attitude is not None:
            R = euler_to_rotation(u.attitude) if u.attitude is not None else g.rotation
            p = np.asarray(u.position, dtype=float) if u.position is not None else g.position
            g = Pose(R, p)
        if u.perturb is not None:
            g = compose(g, exp_se3(Twist.from_vector(u.perturb)))
        out[i] = g
    return out, specs


def precheck(scenario: Scenario) -> list[str]:
    """Feasibility prechecks that need the steady formation: hover stations,
    offset sizing against the velocity envelopes, synthesized saturation."""
    problems: list[str] = []
    try:
        _, specs, twists = steady_formation(scenario, scenario.profile.twist_at(0.0))
    except HoverRequired as e:
        return [f"hover station: {e}"]

    ll, fl = scenario.leader_limits, scenario.follower_limits
    if ll is not None and fl is not None:
        try:
            validate_limit_pairing(ll, fl)
        except ValueError as e:
            return [str(e)]
        turns = scenario.profile.max_angular_rate() > 0.0
        cap = max_offset_norm(ll, fl, leader_turns=turns)
        for i in range(1, scenario.n_uavs):
            r = float(np.linalg.norm(scenario.uavs[i].offset))
            if r > cap:
                problems.append(
                    f"uav {i} offset norm {r:.3g} exceeds the sustainable radius {cap:.3g}"
                )
    if fl is not None:
        topo = scenario.topology()
        for i in range(1, scenario.n_uavs):
            # steady demand measured against the follower's own virtual parent
            xi_vp = convex_twist(tuple(twists[p] for p in topo.parents[i]),
                                 topo.weights[i])
            rep = check_saturation(specs[i], xi_vp, fl)
            if not rep.ok:
                problems.append(
                    f"uav {i} steady demand outside the follower envelope "
                    f"(|w| = {rep.angular_rate:.3g} vs {rep.angular_cap:.3g}, "
                    f"vx = {rep.forward_speed:.3g} vs [{rep.forward_min:.3g}, {rep.forward_max:.3g}])"
                )
    return problems


def run(scenario: Scenario, duration: float | None = None, step_size: float | None = None,
        parallel: bool = False) -> TrajectoryLog:
    """Simulate the scenario and return the trajectory log.

    Raises InfeasibleScenario when prechecks fail and SimulationError (with
    node and tick) when geometry blows up mid-run.
    """
    T = scenario.duration if duration is None else duration
    h = scenario.step if step_size is None else step_size
    if not (T > 0.0 and 0.0 < h <= T):
        raise ValueError("need 0 < step <= duration")
    problems = precheck(scenario)
    if problems:
        raise InfeasibleScenario("; ".join(problems))

    topo = scenario.topology()
    order = topological_order(topo)
    groups = layers(topo)
    n = scenario.n_uavs
    poses, specs = initial_state(scenario)
    specs = list(specs)
    resynth = scenario.profile.time_varying
    gains = scenario.gains
    fl = scenario.follower_limits
    n_ticks = int(round(T / h))
    data = np.zeros(((n_ticks + 1) * n, len(COLUMNS)))
    twists: list[Twist] = [Twist.zero()] * n
    errs = [0.0] * n
    flags = [0] * n

    log.info("run %s: %d uavs, %d ticks at h=%g%s", scenario.name, n, n_ticks, h,
             " (parallel)" if parallel else "")

    def eval_node(i: int, k: int, t: float):
        try:
            ps = topo.parents[i]
            snap = ParentSnapshot(tuple(poses[p] for p in ps), tuple(twists[p] for p in ps))
            g_vp, xi_vp = virtual_parent(snap, topo.weights[i])
            spec = specs[i]
            if resynth and scenario.uavs[i].attitude_override is None:
                spec = synthesize_spec(xi_vp, scenario.uavs[i].offset,
                                       scenario.uavs[i].roll, P_RTI)
            cmd = follower_control(g_vp, xi_vp, poses[i], spec, gains, fl)
            err = float(np.linalg.norm(cmd.error))
            return i, spec, cmd, err
        except (NearPiSingularity, GimbalLock, HoverRequired, OutOfSchedule) as e:
            raise SimulationError(i, k, t, e) from e

    def commit(result):
        i, spec, cmd, err = result
        specs[i] = spec
        twists[i] = cmd.twist
        errs[i] = err
        flags[i] = (1 if cmd.saturated else 0) | (2 if cmd.behind else 0)
        if cmd.saturated:
            log.debug("uav %d saturated at t=%g", i, k * h)

    pool = ThreadPoolExecutor(max_workers=min(8, max(n - 1, 1))) if parallel else None
    try:
        for k in range(n_ticks + 1):
            t = k * h
            try:
                twists[0] = scenario.profile.twist_at(t)
            except OutOfSchedule as e:
                raise SimulationError(0, k, t, e) from e
            errs[0] = 0.0
            flags[0] = 0
            if parallel:
                for group in groups[1:]:
                    for result in pool.map(lambda i: eval_node(i, k, t), group):
                        commit(result)
            else:
                for i in order[1:]:
                    commit(eval_node(i, k, t))

            R_lead = poses[0].rotation
            base = k * n
            for i in range(n):
                g = poses[i]
                q = quaternion_from_rotation(g.rotation)
                if i == 0:
                    rel = (0.0, 0.0, 0.0)
                else:
                    ang, _ = rotation_to_euler(R_lead.T @ g.rotation)
                    rel = (ang.phi, ang.theta, ang.psi)
                xi = twists[i]
                data[base + i] = (
                    t, i, g.position[0], g.position[1], g.position[2],
                    q[0], q[1], q[2], q[3],
                    xi.angular[0], xi.angular[1], xi.angular[2], xi.linear[0],
                    errs[i], rel[0], rel[1], rel[2], flags[i],
                )

            if k < n_ticks:
                poses = [step(poses[i], twists[i], h) for i in range(n)]
    finally:
        if pool is not None:
            pool.shutdown(wait=False, cancel_futures=True)

    if math.isnan(data.sum()):
        raise SimulationError(-1, n_ticks, T, ValueError("NaN in the trajectory log"))
    return TrajectoryLog(step=h, n_uavs=n, data=data)
