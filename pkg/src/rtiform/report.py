"""Static feasibility report for a scenario.

Answers, per follower, the questions a mission planner asks before takeoff:
what attitude does the slot demand, is the constrained-axes residual zero,
how fast must the aircraft fly, and does the velocity envelope leave margin.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import HoverRequired
from .feasibility import (check_saturation, max_offset_norm, nonholonomic_residual,
                          offset_velocity, validate_limit_pairing)
from .scenario import Scenario
from .simulate import steady_formation
from .topology import ParentSnapshot, topological_order, virtual_parent


@dataclass(frozen=True)
class FollowerReport:
    node: int
    kind: str
    theta: float
    psi: float
    residual: float
    forward_speed: float
    offset_norm: float
    radius_cap: float
    angular_ok: bool
    forward_ok: bool
    hover: bool

    @property
    def feasible(self) -> bool:
        return not self.hover and self.angular_ok and self.forward_ok


def feasibility_report(scenario: Scenario) -> list[FollowerReport]:
    """One row per follower, evaluated on the steady formation at t=0."""
    kind = scenario.profile.pattern_kind
    ll, fl = scenario.leader_limits, scenario.follower_limits
    if ll is not None and fl is not None:
        validate_limit_pairing(ll, fl)
        turns = scenario.profile.max_angular_rate() > 0.0
        cap = max_offset_norm(ll, fl, leader_turns=turns)
    else:
        cap = math.inf

    rows: list[FollowerReport] = []
    try:
        poses, specs, twists = steady_formation(scenario, scenario.profile.twist_at(0.0))
    except HoverRequired:
        poses = specs = twists = None

    topo = scenario.topology()
    for i in topological_order(topo)[1:]:
        u = scenario.uavs[i]
        r = float(np.linalg.norm(u.offset))
        if specs is None or specs[i] is None:
            # reconstruct enough to tell this node's own story
            rows.append(FollowerReport(i, kind, math.nan, math.nan, math.nan,
                                       math.nan, r, cap, False, False, True))
            continue
        spec = specs[i]
        ps = topo.parents[i]
        snap = ParentSnapshot(tuple(poses[p] for p in ps), tuple(twists[p] for p in ps))
        _, xi_vp = virtual_parent(snap, topo.weights[i])
        try:
            tau = offset_velocity(xi_vp, spec.offset)
            hover = False
        except HoverRequired:
            tau = np.zeros(3)
            hover = True
        res = nonholonomic_residual(spec, xi_vp) if not hover else math.nan
        if fl is not None:
            rep = check_saturation(spec, xi_vp, fl)
            angular_ok, forward_ok = rep.angular_ok, rep.forward_ok
        else:
            angular_ok = forward_ok = True
        rows.append(FollowerReport(
            node=i, kind=spec.kind,
            theta=spec.angles.theta, psi=spec.angles.psi,
            residual=res, forward_speed=float(np.linalg.norm(tau)),
            offset_norm=r, radius_cap=cap,
            angular_ok=angular_ok, forward_ok=forward_ok and r <= cap,
            hover=hover,
        ))
    return rows


def render_text(scenario: Scenario, rows: list[FollowerReport]) -> str:
    head = (f"scenario {scenario.name}: {scenario.n_uavs} uavs, "
            f"pattern {scenario.profile.pattern_kind}")
    lines = [head,
             f"{'uav':>4} {'kind':>6} {'theta':>10} {'psi':>10} {'residual':>10} "
             f"{'speed':>8} {'radius':>8} {'cap':>8}  status"]
    for r in rows:
        if r.hover:
            status = "HOVER"
        elif r.feasible:
            status = "ok"
        else:
            status = "saturated"
        cap = "inf" if math.isinf(r.radius_cap) else f"{r.radius_cap:8.3f}"
        lines.append(
            f"{r.node:>4} {r.kind:>6} {r.theta:>10.5f} {r.psi:>10.5f} "
            f"{r.residual:>10.2e} {r.forward_speed:>8.3f} {r.offset_norm:>8.3f} "
            f"{cap:>8}  {status}")
    ok = all(r.feasible for r in rows)
    lines.append("feasible" if ok else "INFEASIBLE")
    return "\n".join(lines) + "\n"


def write_csv(path, rows: list[FollowerReport]) -> None:
    cols = ("node", "kind", "theta", "psi", "residual", "forward_speed",
            "offset_norm", "radius_cap", "angular_ok", "forward_ok", "hover")
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(",".join(cols) + "\n")
        for r in rows:
            f.write(",".join([
                str(r.node), r.kind, repr(r.theta), repr(r.psi), repr(r.residual),
                repr(r.forward_speed), repr(r.offset_norm), repr(r.radius_cap),
                str(int(r.angular_ok)), str(int(r.forward_ok)), str(int(r.hover)),
            ]) + "\n")
