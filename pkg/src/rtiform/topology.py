"""Formation topology: a DAG of UAVs with weighted multi-parent links.

Node 0 is the leader. Every other node tracks a virtual parent obtained by
folding its parents' states left to right: poses combine along geodesics
(``g <- g * exp(lambda * log(g^-1 * g_next))``) and twists combine affinely
(``xi <- (1 - lambda) * xi + lambda * xi_next``). Parent lists are kept in
ascending node order so the fold, and therefore every downstream number, is
reproducible.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Sequence

from .errors import CycleDetected
from .lie import Pose, Twist, compose, exp_se3, inverse, log_se3


@dataclass(frozen=True)
class SwarmTopology:
    """Parent lists and fold weights, indexed by node.

    ``parents[i]`` is a strictly ascending tuple of node indices; node 0 has
    none. ``weights[i]`` holds the fold weights, one fewer than the number of
    parents.
    """

    parents: tuple[tuple[int, ...], ...]
    weights: tuple[tuple[float, ...], ...]

    @property
    def n_nodes(self) -> int:
        return len(self.parents)

    @staticmethod
    def with_default_weights(parents: Sequence[Sequence[int]]) -> "SwarmTopology":
        """Uniform averaging: weight 1/(j+2) at 0-based fold step j is the running mean."""
        norm = tuple(tuple(sorted(p)) for p in parents)
        weights = tuple(
            tuple(1.0 / (j + 2) for j in range(max(len(p) - 1, 0))) for p in norm
        )
        topo = SwarmTopology(norm, weights)
        topo.validate()
        return topo

    def validate(self) -> None:
        n = self.n_nodes
        if n == 0:
            raise ValueError("topology has no nodes")
        if len(self.weights) != n:
            raise ValueError("weights and parents must have one entry per node")
        if self.parents[0]:
            raise ValueError("node 0 is the leader and cannot have parents")
        for i in range(1, n):
            ps = self.parents[i]
            if not ps:
                raise ValueError(f"node {i} has no parents")
            if list(ps) != sorted(set(ps)):
                raise ValueError(f"node {i} parents must be strictly ascending")
            for p in ps:
                if not 0 <= p < n:
                    raise ValueError(f"node {i} references unknown parent {p}")
                if p == i:
                    raise ValueError(f"node {i} cannot parent itself")
            if len(self.weights[i]) != len(ps) - 1:
                raise ValueError(
                    f"node {i} needs {len(ps) - 1} weights, got {len(self.weights[i])}"
                )
            for lam in self.weights[i]:
                if not 0.0 <= lam <= 1.0:
                    raise ValueError(f"node {i} weight {lam} outside [0, 1]")
        topological_order(self)  # raises CycleDetected


def topological_order(topology: SwarmTopology) -> list[int]:
    """Kahn's algorithm with a min-heap, so ties break by node index."""
    n = topology.n_nodes
    children: list[list[int]] = [[] for _ in range(n)]
    indeg = [0] * n
    for i in range(n):
        for p in topology.parents[i]:
            children[p].append(i)
            indeg[i] += 1
    ready = [i for i in range(n) if indeg[i] == 0]
    heapq.heapify(ready)
    order: list[int] = []
    while ready:
        i = heapq.heappop(ready)
        order.append(i)
        for c in children[i]:
            indeg[c] -= 1
            if indeg[c] == 0:
                heapq.heappush(ready, c)
    if len(order) != n:
        stuck = sorted(set(range(n)) - set(order))
        raise CycleDetected(f"cycle through nodes {stuck}")
    return order


def layers(topology: SwarmTopology) -> list[list[int]]:
    """Nodes grouped by longest path from the leader; each layer only depends
    on earlier ones, so a layer may be evaluated concurrently."""
    depth = [0] * topology.n_nodes
    for i in topological_order(topology):
        if topology.parents[i]:
            depth[i] = 1 + max(depth[p] for p in topology.parents[i])
    out: list[list[int]] = [[] for _ in range(max(depth) + 1)]
    for i, d in enumerate(depth):
        out[d].append(i)
    return out


@dataclass(frozen=True)
class ParentSnapshot:
    """Poses and twists of one node's parents, in parent order."""

    poses: tuple[Pose, ...]
    twists: tuple[Twist, ...]


def convex_pose(poses: Sequence[Pose], weights: Sequence[float]) -> Pose:
    """Left-to-right geodesic fold of poses. weights[j] in [0, 1] blends the
    running result toward poses[j + 1]; a weight of 1 lands exactly on it."""
    g = poses[0]
    for gk, lam in zip(poses[1:], weights):
        g = compose(g, exp_se3(log_se3(compose(inverse(g), gk)).scaled(lam)))
    return g


def convex_twist(twists: Sequence[Twist], weights: Sequence[float]) -> Twist:
    """Affine fold of twists with the same weights as convex_pose.

    An affine combination of twists with zero lateral/vertical speed keeps
    those components exactly zero, so virtual parents stay flyable.
    """
    xi = twists[0]
    for xik, lam in zip(twists[1:], weights):
        xi = Twist(
            (1.0 - lam) * xi.angular + lam * xik.angular,
            (1.0 - lam) * xi.linear + lam * xik.linear,
        )
    return xi


def virtual_parent(snapshot: ParentSnapshot, weights: Sequence[float]) -> tuple[Pose, Twist]:
    """Pose and twist of the virtual parent defined by a parent snapshot."""
    if len(snapshot.poses) == 1:
        return snapshot.poses[0], snapshot.twists[0]
    return convex_pose(snapshot.poses, weights), convex_twist(snapshot.twists, weights)
