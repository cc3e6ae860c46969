"""Undirected communication graph and its matrices."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    """Undirected graph on ``n`` nodes with a canonical (sorted) edge list.

    The edge order fixes the column order of every edge-indexed matrix
    (incidence, distance weights), so keep using ``g.edges`` rather than
    re-deriving pairs from the adjacency matrix.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    _tail: np.ndarray = field(init=False, repr=False, compare=False)
    _head: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=np.intp).reshape(-1, 2)
        tail, head = e[:, 0].copy(), e[:, 1].copy()
        tail.flags.writeable = False
        head.flags.writeable = False
        object.__setattr__(self, "_tail", tail)
        object.__setattr__(self, "_head", head)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def tail(self) -> np.ndarray:
        """Smaller endpoint of every edge, canonical order."""
        return self._tail

    @property
    def head(self) -> np.ndarray:
        """Larger endpoint of every edge, canonical order."""
        return self._head

    def neighbors(self, i: int) -> list[int]:
        out = [b for a, b in self.edges if a == i]
        out += [a for a, b in self.edges if b == i]
        return sorted(out)

    def degree(self) -> np.ndarray:
        return np.bincount(self._tail, minlength=self.n) + np.bincount(self._head, minlength=self.n)

    def edge_index(self, i: int, j: int) -> int:
        return self.edges.index((min(i, j), max(i, j)))


def from_edges(n: int, edges: Iterable[Sequence[int]]) -> Graph:
    if n < 1:
        raise GraphError(f"n must be positive, got {n}")
    seen = set()
    for pair in edges:
        i, j = (int(v) for v in pair)
        if not (0 <= i < n and 0 <= j < n):
            raise GraphError(f"edge ({i}, {j}) out of range for n={n}")
        if i == j:
            raise GraphError(f"self-loop at node {i}")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise GraphError(f"duplicate edge {key}")
        seen.add(key)
    return Graph(n, tuple(sorted(seen)))


def complete(n: int) -> Graph:
    return from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def cycle(n: int) -> Graph:
    return from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def disk_graph(points: np.ndarray, radius: float) -> Graph:
    """Connect every pair of points closer than ``radius``."""
    p = np.asarray(points, dtype=float)
    diff = p[:, None, :] - p[None, :, :]
    dist = np.sqrt((diff**2).sum(-1))
    i, j = np.nonzero(np.triu(dist <= radius, k=1))
    return from_edges(len(p), zip(i.tolist(), j.tolist()))


def adjacency(g: Graph) -> np.ndarray:
    A = np.zeros((g.n, g.n))
    A[g.tail, g.head] = 1.0
    A[g.head, g.tail] = 1.0
    return A


def degree_matrix(g: Graph) -> np.ndarray:
    return np.diag(g.degree().astype(float))


def laplacian(g: Graph) -> np.ndarray:
    return degree_matrix(g) - adjacency(g)


def incidence(g: Graph) -> np.ndarray:
    """n x M incidence matrix; +1 at the smaller endpoint, -1 at the larger."""
    B = np.zeros((g.n, g.m))
    cols = np.arange(g.m)
    B[g.tail, cols] = 1.0
    B[g.head, cols] = -1.0
    return B


def is_connected(g: Graph) -> bool:
    adj = [[] for _ in range(g.n)]
    for i, j in g.edges:
        adj[i].append(j)
        adj[j].append(i)
    seen = {0}
    queue = deque([0])
    while queue:
        for nb in adj[queue.popleft()]:
            if nb not in seen:
                seen.add(nb)
                queue.append(nb)
    return len(seen) == g.n


def rigidity_matrix(g: Graph, placement: np.ndarray) -> np.ndarray:
    p = np.asarray(placement, dtype=float)
    n, dim = p.shape
    R = np.zeros((g.m, dim * n))
    for k, (i, j) in enumerate(g.edges):
        d = p[i] - p[j]
        R[k, dim * i:dim * i + dim] = d
        R[k, dim * j:dim * j + dim] = -d
    return R


def is_rigid(g: Graph, placement: np.ndarray, tol: float = 1e-8) -> bool:
    """Infinitesimal rigidity by rank of the rigidity matrix.

    Rank counts singular values above ``tol`` times the largest one. A fully
    coincident placement has an all-zero rigidity matrix and is reported as
    not rigid.
    """
    p = np.asarray(placement, dtype=float)
    n, dim = p.shape
    if dim not in (2, 3):
        raise GraphError(f"placement dimension must be 2 or 3, got {dim}")
    if n != g.n:
        raise GraphError(f"placement has {n} rows, graph has {g.n} nodes")
    if n < dim:
        raise GraphError(f"need at least {dim} nodes for a rigidity test in R^{dim}")
    needed = dim * n - dim * (dim + 1) // 2
    if g.m == 0:
        return needed <= 0
    sv = np.linalg.svd(rigidity_matrix(g, p), compute_uv=False)
    if sv[0] == 0.0:
        return False
    rank = int(np.sum(sv > tol * sv[0]))
    return rank == needed
