"""Roto-translation-invariant formations of fixed-wing UAV swarms.

Rigid-body pose/twist algebra, feasibility analysis for nonholonomic
formation slots, a log-feedback tracking controller and a deterministic
closed-loop simulator with CSV/SVG export.
"""
from .controller import (ControlGains, FollowerCommand, alignment_rates,
                         follower_control, tracking_error, tracking_twist,
                         virtual_leader)
from .errors import (CycleDetected, GimbalLock, HoverRequired, InfeasibleScenario,
                     NearPiSingularity, NotSkew, OutOfSchedule, ScenarioError,
                     SimulationError)
from .feasibility import (P_RTI, RTI, FormationSpec, SaturationReport, VelocityLimits,
                          check_saturation, formation_kind, identity_attitude_feasible,
                          maintenance_velocity, max_offset_norm, nonholonomic_residual,
                          offset_velocity, synthesize_attitude, synthesize_spec,
                          validate_limit_pairing)
from .lie import (Pose, Twist, adjoint, compose, exp_se3, exp_so3, hat3, inverse,
                  log_se3, log_so3, project_rotation, quaternion_from_rotation, vee3)
from .scenario import (LeaderProfile, Scenario, ScheduleEntry, UavConfig,
                       builtin_scenarios, load_scenario, maneuver_schedule,
                       resolve_scenario, validate_scenario)
from .simulate import TrajectoryLog, initial_state, precheck, run, steady_formation
from .topology import (ParentSnapshot, SwarmTopology, convex_pose, convex_twist,
                       layers, topological_order, virtual_parent)
from .uav import (EulerAngles, UavState, euler_rates, euler_to_rotation,
                  is_nonholonomic, rotation_to_euler, step)

__version__ = "0.1.0"

__all__ = [
    "ControlGains", "FollowerCommand", "alignment_rates", "follower_control",
    "tracking_error", "tracking_twist", "virtual_leader",
    "CycleDetected", "GimbalLock", "HoverRequired", "InfeasibleScenario",
    "NearPiSingularity", "NotSkew", "OutOfSchedule", "ScenarioError",
    "SimulationError",
    "P_RTI", "RTI", "FormationSpec", "SaturationReport", "VelocityLimits",
    "check_saturation", "formation_kind", "identity_attitude_feasible",
    "maintenance_velocity", "max_offset_norm", "nonholonomic_residual",
    "offset_velocity", "synthesize_attitude", "synthesize_spec",
    "validate_limit_pairing",
    "Pose", "Twist", "adjoint", "compose", "exp_se3", "exp_so3", "hat3",
    "inverse", "log_se3", "log_so3", "project_rotation",
    "quaternion_from_rotation", "vee3",
    "LeaderProfile", "Scenario", "ScheduleEntry", "UavConfig",
    "builtin_scenarios", "load_scenario", "maneuver_schedule",
    "resolve_scenario", "validate_scenario",
    "TrajectoryLog", "initial_state", "precheck", "run", "steady_formation",
    "ParentSnapshot", "SwarmTopology", "convex_pose", "convex_twist", "layers",
    "topological_order", "virtual_parent",
    "EulerAngles", "UavState", "euler_rates", "euler_to_rotation",
    "is_nonholonomic", "rotation_to_euler", "step",
    "__version__",
]
