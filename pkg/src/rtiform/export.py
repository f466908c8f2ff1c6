"""Trajectory log exporters: CSV and SVG plots."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .simulate import TrajectoryLog

_PLANES = (("x", "y", 2, 3), ("x", "z", 2, 4), ("y", "z", 3, 4))


def write_csv(log: TrajectoryLog, path) -> None:
    log.to_csv(path)


def _leader_reference(log: TrajectoryLog) -> np.ndarray:
    # dashed overlay: where the leader actually flew, replotted as the pattern
    # reference so the follower tracks can be read against it
    return log.for_uav(0)[:, 2:5]


def trajectory_figure(log: TrajectoryLog):
    """Three planar projections; one line per UAV plus the leader reference."""
    fig, axes = plt.subplots(1, 3, figsize=(13.5, 4.5))
    ref = _leader_reference(log)
    for ax, (nx, ny, jx, jy) in zip(axes, _PLANES):
        for i in range(log.n_uavs):
            rows = log.for_uav(i)
            label = "leader" if i == 0 else f"uav {i}"
            ax.plot(rows[:, jx], rows[:, jy], linewidth=1.0, label=label)
        ax.plot(ref[:, jx - 2], ref[:, jy - 2], "k--", linewidth=0.8, alpha=0.6,
                label="reference")
        ax.set_xlabel(f"{nx} [m]")
        ax.set_ylabel(f"{ny} [m]")
        ax.set_aspect("equal", adjustable="datalim")
        ax.grid(True, alpha=0.3)
    axes[0].legend(loc="best", fontsize=8)
    fig.tight_layout()
    return fig


def error_figure(log: TrajectoryLog):
    """Pose-error norm against time for every follower."""
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    t = log.times()
    has_positive = False
    for i in range(1, log.n_uavs):
        e = log.column("err_norm", uav=i)
        has_positive = has_positive or bool(np.any(e > 0.0))
        ax.plot(t, e, linewidth=1.0, label=f"uav {i}")
    ax.set_xlabel("t [s]")
    ax.set_ylabel("pose error norm")
    if has_positive:
        ax.set_yscale("log")
    ax.grid(True, which="both", alpha=0.3)
    if log.n_uavs > 1:
        ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return fig


def export_svg(log: TrajectoryLog, trajectory_path, error_path) -> None:
    fig = trajectory_figure(log)
    try:
        fig.savefig(trajectory_path, format="svg")
    finally:
        plt.close(fig)
    fig = error_figure(log)
    try:
        fig.savefig(error_path, format="svg")
    finally:
        plt.close(fig)
