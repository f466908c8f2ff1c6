"""Scenario definitions and the flat INI file format that stores them.

A scenario is a leader motion profile, a controller configuration, optional
velocity limits, and one section per UAV giving its parents, formation offset,
and initial state. Everything is plain key-value text so runs are easy to
diff and reproduce. See the shipped files under ``rtiform/scenarios/``.
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .controller import ControlGains
from .errors import OutOfSchedule, ScenarioError
from .feasibility import VelocityLimits, formation_kind
from .lie import Twist
from .topology import SwarmTopology
from .uav import EulerAngles

PROFILE_KINDS = ("line", "helix", "piecewise")


@dataclass(frozen=True)
class ScheduleEntry:
    """One piecewise segment: angular velocity constant + amplitude * sin(frequency * (t - t_start))
    on the interval (t_start, t_end] (the first segment also covers its start)."""

    t_start: float
    t_end: float
    constant: tuple[float, float, float]
    amplitude: tuple[float, float, float]
    frequency: float

    def omega(self, t: float) -> np.ndarray:
        s = math.sin(self.frequency * (t - self.t_start)) if self.frequency else 0.0
        return np.array([
            self.constant[0] + self.amplitude[0] * s,
            self.constant[1] + self.amplitude[1] * s,
            self.constant[2] + self.amplitude[2] * s,
        ])


def maneuver_schedule() -> tuple[ScheduleEntry, ...]:
    """Default piecewise schedule: single-axis sine pulses on pitch then yaw, a
    straight recovery leg, then a coupled three-axis ramp into a constant turn."""
    f = 0.1 * math.pi
    zero = (0.0, 0.0, 0.0)
    return (
        ScheduleEntry(0.0, 20.0, zero, (0.0, -0.15, 0.0), f),
        ScheduleEntry(20.0, 30.0, zero, (0.0, 0.0, -0.25), f),
        ScheduleEntry(30.0, 50.0, zero, zero, 0.0),
        ScheduleEntry(50.0, 55.0, zero, (0.1, 0.15, 0.2), f),
        ScheduleEntry(55.0, math.inf, (0.1, 0.15, 0.2), zero, 0.0),
    )


@dataclass(frozen=True)
class LeaderProfile:
    """Leader motion: constant cruise twist (line/helix) or a piecewise schedule."""

    kind: str
    speed: float = 5.0
    omega: tuple[float, float, float] = (0.0, 0.0, 0.0)
    schedule: tuple[ScheduleEntry, ...] = ()

    @property
    def time_varying(self) -> bool:
        return self.kind == "piecewise"

    @property
    def pattern_kind(self) -> str:
        return formation_kind(self.time_varying)

    def max_angular_rate(self) -> float:
        if self.kind == "line":
            return 0.0
        if self.kind == "helix":
            return float(np.linalg.norm(self.omega))
        return max(
            float(np.linalg.norm(e.constant) + np.linalg.norm(e.amplitude))
            for e in self.schedule
        )

    def breakpoints(self) -> list[float]:
        """Interior segment boundaries (where the schedule switches behavior)."""
        if self.kind != "piecewise":
            return []
        return [e.t_end for e in self.schedule[:-1] if math.isfinite(e.t_end)]

    def twist_at(self, t: float) -> Twist:
        """Leader body twist at time t. Raises OutOfSchedule outside coverage."""
        if t < 0.0:
            raise OutOfSchedule(f"t = {t} is before the profile starts")
        v = np.array([self.speed, 0.0, 0.0])
        if self.kind == "line":
            return Twist(np.zeros(3), v)
        if self.kind == "helix":
            return Twist(np.asarray(self.omega, dtype=float), v)
        for e in self.schedule:
            first = e is self.schedule[0]
            if (first and e.t_start <= t <= e.t_end) or (e.t_start < t <= e.t_end):
                return Twist(e.omega(t), v)
        raise OutOfSchedule(f"t = {t} is past the schedule end")


@dataclass
class UavConfig:
    """One aircraft: graph links, formation spec inputs, and initial state.

    With no explicit position/attitude the UAV starts exactly on its formation
    slot (leader defaults to the origin at identity); ``perturb`` then displaces
    it by exp of the given twist coordinates (wx wy wz x y z).
    """

    node: int
    parents: tuple[int, ...] = ()
    weights: tuple[float, ...] | None = None
    offset: np.ndarray | None = None
    roll: float = 0.0
    attitude_override: EulerAngles | None = None
    position: np.ndarray | None = None
    attitude: EulerAngles | None = None
    perturb: np.ndarray | None = None


@dataclass
class Scenario:
    name: str
    duration: float
    step: float
    profile: LeaderProfile
    gains: ControlGains = field(default_factory=ControlGains)
    leader_limits: VelocityLimits | None = None
    follower_limits: VelocityLimits | None = None
    uavs: list[UavConfig] = field(default_factory=list)

    @property
    def n_uavs(self) -> int:
        return len(self.uavs)

    def topology(self) -> SwarmTopology:
        parents = [tuple(u.parents) for u in self.uavs]
        explicit = [u.weights for u in self.uavs]
        topo = SwarmTopology.with_default_weights(parents)
        if any(w is not None for w in explicit):
            weights = tuple(
                tuple(explicit[i]) if explicit[i] is not None else topo.weights[i]
                for i in range(len(parents))
            )
            topo = SwarmTopology(topo.parents, weights)
            topo.validate()
        return topo


def _floats(raw: str, n: int | None, where: str) -> list[float]:
    try:
        vals = [float(x) for x in raw.split()]
    except ValueError as e:
        raise ScenarioError(f"{where}: {e}") from e
    if n is not None and len(vals) != n:
        raise ScenarioError(f"{where}: expected {n} numbers, got {len(vals)}")
    return vals


def _get(cfg: configparser.ConfigParser, sect: str, key: str, default=None):
    if cfg.has_option(sect, key):
        raw = cfg.get(sect, key).strip()
        if raw:
            return raw
    return default


def _parse_profile(cfg: configparser.ConfigParser) -> LeaderProfile:
    if not cfg.has_section("profile"):
        raise ScenarioError("missing [profile] section")
    kind = _get(cfg, "profile", "kind")
    if kind not in PROFILE_KINDS:
        raise ScenarioError(f"profile kind must be one of {PROFILE_KINDS}, got {kind!r}")
    speed = float(_get(cfg, "profile", "speed", "5.0"))
    omega = (0.0, 0.0, 0.0)
    if kind == "helix":
        omega = tuple(_floats(_get(cfg, "profile", "omega", "0 0 0"), 3, "profile.omega"))
    schedule: tuple[ScheduleEntry, ...] = ()
    if kind == "piecewise":
        segs = []
        i = 1
        while cfg.has_option("profile", f"segment{i}"):
            v = _floats(cfg.get("profile", f"segment{i}"), 9, f"profile.segment{i}")
            segs.append(ScheduleEntry(v[0], v[1], tuple(v[2:5]), tuple(v[5:8]), v[8]))
            i += 1
        schedule = tuple(segs) if segs else maneuver_schedule()
    return LeaderProfile(kind=kind, speed=speed, omega=omega, schedule=schedule)


def _parse_uav(cfg: configparser.ConfigParser, sect: str, node: int) -> UavConfig:
    u = UavConfig(node=node)
    raw = _get(cfg, sect, "parents")
    if raw is not None:
        try:
            u.parents = tuple(int(x) for x in raw.split())
        except ValueError as e:
            raise ScenarioError(f"{sect}.parents: {e}") from e
    raw = _get(cfg, sect, "weights")
    if raw is not None:
        u.weights = tuple(_floats(raw, None, f"{sect}.weights"))
    raw = _get(cfg, sect, "offset")
    if raw is not None:
        u.offset = np.array(_floats(raw, 3, f"{sect}.offset"))
    u.roll = float(_get(cfg, sect, "roll", "0.0"))
    raw = _get(cfg, sect, "attitude_override")
    if raw is not None:
        u.attitude_override = EulerAngles(*_floats(raw, 3, f"{sect}.attitude_override"))
    raw = _get(cfg, sect, "position")
    if raw is not None:
        u.position = np.array(_floats(raw, 3, f"{sect}.position"))
    raw = _get(cfg, sect, "attitude")
    if raw is not None:
        u.attitude = EulerAngles(*_floats(raw, 3, f"{sect}.attitude"))
    raw = _get(cfg, sect, "perturb")
    if raw is not None:
        u.perturb = np.array(_floats(raw, 6, f"{sect}.perturb"))
    return u


def _parse_limits(cfg: configparser.ConfigParser) -> tuple[VelocityLimits | None, VelocityLimits | None]:
    if not cfg.has_section("limits"):
        return None, None
    def build(prefix: str) -> VelocityLimits | None:
        keys = [f"{prefix}_alpha", f"{prefix}_beta_min", f"{prefix}_beta_max"]
        vals = [_get(cfg, "limits", k) for k in keys]
        if all(v is None for v in vals):
            return None
        if any(v is None for v in vals):
            raise ScenarioError(f"[limits]: need all of {keys}")
        try:
            return VelocityLimits(float(vals[0]), float(vals[1]), float(vals[2]))
        except ValueError as e:
            raise ScenarioError(f"[limits] {prefix}: {e}") from e
    return build("leader"), build("follower")


def load_scenario(path) -> Scenario:
    """Parse a scenario file. OSError surfaces for unreadable paths; structural
    problems raise ScenarioError."""
    path = Path(path)
    cfg = configparser.ConfigParser()
    with open(path, "r", encoding="utf-8") as f:
        try:
            cfg.read_file(f, source=str(path))
        except configparser.Error as e:
            raise ScenarioError(f"{path}: {e}") from e

    name = _get(cfg, "scenario", "name", path.stem) if cfg.has_section("scenario") else path.stem
    duration = float(_get(cfg, "scenario", "duration", "10.0")) if cfg.has_section("scenario") else 10.0
    step = float(_get(cfg, "scenario", "step", "0.01")) if cfg.has_section("scenario") else 0.01

    profile = _parse_profile(cfg)

    gains = ControlGains()
    if cfg.has_section("gains"):
        try:
            gains = ControlGains(
                tracking=float(_get(cfg, "gains", "kp", "1.0")),
                alignment=float(_get(cfg, "gains", "ka", "1.0")),
            )
        except ValueError as e:
            raise ScenarioError(f"[gains]: {e}") from e

    leader_limits, follower_limits = _parse_limits(cfg)

    nodes: dict[int, UavConfig] = {}
    for sect in cfg.sections():
        if not sect.startswith("uav"):
            continue
        tail = sect[3:].strip()
        try:
            node = int(tail)
        except ValueError as e:
            raise ScenarioError(f"bad uav section name [{sect}]") from e
        if node in nodes:
            raise ScenarioError(f"duplicate section for uav {node}")
        nodes[node] = _parse_uav(cfg, sect, node)
    if not nodes:
        raise ScenarioError("no [uav N] sections found")
    expected = set(range(len(nodes)))
    if set(nodes) != expected:
        raise ScenarioError(f"uav sections must number 0..{len(nodes) - 1}, got {sorted(nodes)}")

    sc = Scenario(
        name=name, duration=duration, step=step, profile=profile, gains=gains,
        leader_limits=leader_limits, follower_limits=follower_limits,
        uavs=[nodes[i] for i in range(len(nodes))],
    )
    problems = validate_scenario(sc)
    if problems:
        raise ScenarioError("; ".join(problems))
    return sc


def validate_scenario(sc: Scenario) -> list[str]:
    """Structural and static invariant checks; returns human-readable problems.

    Feasibility prechecks that need the steady formation state (hover, limit
    sizing) live in ``simulate.precheck``.
    """
    problems: list[str] = []
    if not sc.duration > 0.0:
        problems.append("duration must be positive")
    if not 0.0 < sc.step <= sc.duration:
        problems.append("step must be positive and no larger than duration")
    if sc.profile.kind not in PROFILE_KINDS:
        problems.append(f"unknown profile kind {sc.profile.kind!r}")
    if not sc.profile.speed > 0.0:
        problems.append("profile speed must be positive")
    if sc.profile.kind == "piecewise":
        segs = sc.profile.schedule
        if not segs:
            problems.append("piecewise profile has no segments")
        else:
            if segs[0].t_start != 0.0:
                problems.append("schedule must start at t = 0")
            for a, b in zip(segs, segs[1:]):
                if b.t_start != a.t_end:
                    problems.append(f"schedule gap between t = {a.t_end} and {b.t_start}")
            if segs[-1].t_end < sc.duration:
                problems.append("schedule ends before the scenario duration")
    if sc.n_uavs < 1:
        problems.append("need at least the leader")
    else:
        if sc.uavs[0].parents:
            problems.append("uav 0 is the leader and cannot have parents")
        if sc.uavs[0].offset is not None:
            problems.append("uav 0 is the leader and takes no offset")
        for u in sc.uavs[1:]:
            if u.offset is None:
                problems.append(f"uav {u.node} needs an offset")
            if not u.parents:
                problems.append(f"uav {u.node} needs parents")
        try:
            sc.topology()
        except ValueError as e:  # CycleDetected included
            problems.append(str(e))
    if sc.leader_limits is not None and sc.follower_limits is not None:
        try:
            from .feasibility import validate_limit_pairing
            validate_limit_pairing(sc.leader_limits, sc.follower_limits)
        except ValueError as e:
            problems.append(str(e))
    if sc.leader_limits is not None:
        if not (sc.leader_limits.forward_min <= sc.profile.speed <= sc.leader_limits.forward_max):
            problems.append("profile speed outside the leader's limits")
        if sc.profile.max_angular_rate() > sc.leader_limits.angular_cap:
            problems.append("profile angular rate exceeds the leader's cap")
    return problems


def builtin_scenarios() -> list[str]:
    """Names of the scenario files shipped with the package."""
    files = resources.files("rtiform").joinpath("scenarios")
    return sorted(p.name[:-4] for p in files.iterdir() if p.name.endswith(".ini"))


def resolve_scenario(name_or_path: str) -> Scenario:
    """Load a scenario from a filesystem path or a shipped scenario name."""
    p = Path(name_or_path)
    if p.exists():
        return load_scenario(p)
    files = resources.files("rtiform").joinpath("scenarios")
    candidate = files.joinpath(f"{name_or_path}.ini")
    if candidate.is_file():
        with resources.as_file(candidate) as real:
            return load_scenario(real)
    raise FileNotFoundError(
        f"{name_or_path!r} is neither a file nor a shipped scenario "
        f"(shipped: {', '.join(builtin_scenarios())})"
    )
