"""Exceptions raised across the package.

Geometry errors are loud by design: no operation silently branches around a
singular configuration.
"""


class NotSkew(ValueError):
    """Matrix handed to vee3 is not skew-symmetric within tolerance."""


class NearPiSingularity(ValueError):
    """Rotation angle is numerically at pi, where the log map is ill-conditioned."""


class GimbalLock(ValueError):
    """Euler-rate map is undefined at cos(theta) = 0."""


class CycleDetected(ValueError):
    """Parent graph contains a cycle; a formation topology must be a DAG."""


class HoverRequired(ValueError):
    """The offset point has zero velocity in the leader frame.

    A fixed-wing aircraft cannot hold that station: it has no hover mode.
    """


class OutOfSchedule(ValueError):
    """Requested time lies outside the leader profile's schedule."""


class ScenarioError(ValueError):
    """Scenario file is missing, malformed, or violates a structural invariant."""


class InfeasibleScenario(ValueError):
    """Scenario fails a feasibility or velocity-limit precheck."""


class SimulationError(RuntimeError):
    """Error raised inside the tick loop, annotated with node and tick."""

    def __init__(self, node: int, tick: int, t: float, cause: Exception):
        self.node = node
        self.tick = tick
        self.t = t
        self.cause = cause
        super().__init__(f"uav {node} at tick {tick} (t={t:.6g}s): {cause}")
