"""Desired inter-agent distances over the edges of a graph."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import Graph


class FormationError(ValueError):
    pass


@dataclass(frozen=True)
class FormationSpec:
    graph: Graph
    desired_dist: np.ndarray  # (M,) in canonical edge order
    delta_max: float = field(init=False)

    def __post_init__(self):
        d = np.array(self.desired_dist, dtype=float).reshape(-1)
        if d.shape[0] != self.graph.m:
            raise FormationError(f"expected {self.graph.m} distances, got {d.shape[0]}")
        if self.graph.m == 0:
            raise FormationError("formation needs at least one edge")
        if not np.all(np.isfinite(d)) or np.any(d <= 0):
            raise FormationError("desired distances must be finite and positive")
        d.flags.writeable = False
        object.__setattr__(self, "desired_dist", d)
        object.__setattr__(self, "delta_max", float(d.max()))

    @property
    def desired_sq(self) -> np.ndarray:
        return self.desired_dist**2

    @property
    def wtilde(self) -> np.ndarray:
        """M x M diagonal of squared desired distances."""
        return np.diag(self.desired_sq)

    def distance(self, i: int, j: int) -> float:
        return float(self.desired_dist[self.graph.edge_index(i, j)])


def from_distances(g: Graph, dists) -> FormationSpec:
    # realizability is the caller's problem
    return FormationSpec(g, np.asarray(dists, dtype=float))


def from_target_placement(g: Graph, target: np.ndarray) -> FormationSpec:
    p = np.asarray(target, dtype=float)
    if p.shape[0] != g.n:
        raise FormationError(f"target has {p.shape[0]} rows, graph has {g.n} nodes")
    d = np.linalg.norm(p[g.head] - p[g.tail], axis=1)
    if np.any(d == 0):
        k = int(np.argmin(d))
        raise FormationError(f"adjacent targets coincide on edge {g.edges[k]}")
    return FormationSpec(g, d)
