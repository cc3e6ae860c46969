"""Distance-based formation control law and the quantities derived from it.

Positions are ``(n, D)`` arrays. The D-dimensional weighted Laplacian acts
as ``L (x) I_D``, which on an ``(n, D)`` array is just ``L @ x``; it is never
built as a ``(nD, nD)`` matrix.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .formation import FormationSpec
from .graph import incidence


class ParameterRangeError(ValueError):
    """A controller parameter is outside the range the stability result needs."""


@dataclass(frozen=True)
class ARule:
    """How a_i is chosen at every evaluation.

    ``fraction``: a_i = value / sum_j |D_ij| with 0 < value < 1 (value=0.5 is
    the a_i = 1 / (2 sum_j |D_ij|) choice). ``constant``: a_i = value, checked
    against 1 / sum_j |D_ij| every time it is used.
    """

    kind: str = "fraction"
    value: float = 0.5

    def __post_init__(self):
        if self.kind not in ("fraction", "constant"):
            raise ParameterRangeError(f"unknown a-rule kind {self.kind!r}")
        if self.value <= 0 or (self.kind == "fraction" and self.value >= 1):
            raise ParameterRangeError(f"a-rule value {self.value} out of range")


@dataclass
class ControllerParams:
    alpha: float
    A: np.ndarray  # (n, D), A_{i,d} > 0
    sigma: np.ndarray  # (n,), 0 < sigma_i < Delta^2
    a_rule: ARule = field(default_factory=ARule)
    b: float = 1.0
    c: float = 1.0
    gain_mode: str = "constant"  # or "state"
    v_max: float = 0.2
    k_vel: float = 1.0
    # distance used on the right side of trigger condition 1: "true" or "broadcast"
    trigger_distance: str = "true"

    def __post_init__(self):
        self.A = np.array(self.A, dtype=float)
        self.sigma = np.array(self.sigma, dtype=float).reshape(-1)
        if self.gain_mode not in ("constant", "state"):
            raise ParameterRangeError(f"unknown gain mode {self.gain_mode!r}")
        if self.trigger_distance not in ("true", "broadcast"):
            raise ParameterRangeError(f"unknown trigger distance {self.trigger_distance!r}")
        if not self.alpha > 0:
            raise ParameterRangeError("alpha must be positive")
        if self.A.ndim != 2 or np.any(self.A <= 0):
            raise ParameterRangeError("A must be an (n, D) array of positive values")
        if self.b <= 0 or self.c <= 0:
            raise ParameterRangeError("b and c must be positive")
        if self.gain_mode == "state" and (self.v_max <= 0 or self.k_vel <= 0):
            raise ParameterRangeError("state-dependent gain needs v_max, k_vel > 0")

    @classmethod
    def uniform(cls, spec: FormationSpec, dim: int, alpha: float, A: float = 0.001,
                sigma_frac: float = 0.5, **kw) -> "ControllerParams":
        """Same A and sigma = sigma_frac * Delta^2 for every agent."""
        n = spec.graph.n
        return cls(alpha=alpha, A=np.full((n, dim), float(A)),
                   sigma=np.full(n, sigma_frac * spec.delta_max**2), **kw)

    def check(self, spec: FormationSpec, dim: int) -> None:
        n = spec.graph.n
        if self.A.shape != (n, dim):
            raise ParameterRangeError(f"A has shape {self.A.shape}, expected {(n, dim)}")
        if self.sigma.shape != (n,):
            raise ParameterRangeError(f"sigma has shape {self.sigma.shape}, expected {(n,)}")
        d2 = spec.delta_max**2
        if np.any(self.sigma <= 0) or np.any(self.sigma >= d2):
            raise ParameterRangeError(f"sigma must lie in (0, Delta^2 = {d2:g})")

    @property
    def nominal_alpha(self) -> float:
        return self.alpha if self.gain_mode == "constant" else self.v_max * self.k_vel


@dataclass
class BroadcastTable:
    """Latest broadcast position and time of every agent."""

    last_pos: np.ndarray
    last_time: np.ndarray

    @classmethod
    def from_positions(cls, pos: np.ndarray, t: float = 0.0) -> "BroadcastTable":
        pos = np.array(pos, dtype=float)
        return cls(pos, np.full(pos.shape[0], float(t)))

    def update(self, agents, pos: np.ndarray, t: float) -> None:
        agents = np.asarray(agents, dtype=np.intp)
        self.last_pos[agents] = pos[agents]
        self.last_time[agents] = t


def edge_vectors(spec: FormationSpec, pos: np.ndarray):
    """Per-edge ``x_head - x_tail`` and its squared length."""
    g = spec.graph
    diff = pos[g.head] - pos[g.tail]
    return diff, np.einsum("ij,ij->i", diff, diff)


def edge_weights(spec: FormationSpec, pos: np.ndarray) -> np.ndarray:
    """delta_ij^2 - desired_ij^2 per edge (the diagonal of W(x) - W~)."""
    _, d2 = edge_vectors(spec, pos)
    return d2 - spec.desired_sq


def node_sum(spec: FormationSpec, per_edge: np.ndarray) -> np.ndarray:
    """Sum an edge quantity onto both of its endpoints."""
    g = spec.graph
    return (np.bincount(g.tail, per_edge, minlength=g.n)
            + np.bincount(g.head, per_edge, minlength=g.n))


def weighted_laplacian(spec: FormationSpec, pos: np.ndarray) -> np.ndarray:
    B = incidence(spec.graph)
    w = edge_weights(spec, np.asarray(pos, dtype=float))
    return (B * w) @ B.T


def apply_weighted_laplacian(spec: FormationSpec, pos: np.ndarray, v: np.ndarray) -> np.ndarray:
    """``(L(pos) (x) I_D) v`` for an ``(n, D)`` array ``v``, edge by edge."""
    g = spec.graph
    w = edge_weights(spec, pos)
    flow = w[:, None] * (v[g.tail] - v[g.head])
    out = np.zeros_like(v, dtype=float)
    np.add.at(out, g.tail, flow)
    np.add.at(out, g.head, -flow)
    return out


def _state_gain(spec: FormationSpec, params: ControllerParams, pos: np.ndarray) -> np.ndarray:
    g = spec.graph
    diff = pos[g.head] - pos[g.tail]
    s = np.zeros_like(pos)
    np.add.at(s, g.tail, diff)
    np.add.at(s, g.head, -diff)
    r = np.linalg.norm(s, axis=1)
    gain = np.full(g.n, params.v_max * params.k_vel)  # r -> 0 limit
    nz = r > 1e-12
    gain[nz] = params.v_max * -np.expm1(-params.k_vel * r[nz]) / r[nz]
    return gain


def gains(spec: FormationSpec, params: ControllerParams, pos: np.ndarray) -> np.ndarray:
    if params.gain_mode == "constant":
        return np.full(spec.graph.n, params.alpha)
    return _state_gain(spec, params, pos)


def all_controls(spec: FormationSpec, params: ControllerParams, bpos: np.ndarray) -> np.ndarray:
    """Stacked control computed from broadcast positions, ``-alpha L(x) x``."""
    bpos = np.asarray(bpos, dtype=float)
    return -gains(spec, params, bpos)[:, None] * apply_weighted_laplacian(spec, bpos, bpos)


def control_input(spec: FormationSpec, params: ControllerParams, i: int,
                  bt: BroadcastTable) -> np.ndarray:
    """Control of agent ``i`` from its own and its neighbours' broadcasts."""
    x = bt.last_pos
    u = np.zeros(x.shape[1])
    for j in spec.graph.neighbors(i):
        rel = x[i] - x[j]
        u += (rel @ rel - spec.distance(i, j) ** 2) * rel
    if params.gain_mode == "constant":
        alpha = params.alpha
    else:
        alpha = _state_gain(spec, params, x)[i]
    return -alpha * u


def lyapunov(spec: FormationSpec, params: ControllerParams, pos: np.ndarray) -> float:
    w = edge_weights(spec, np.asarray(pos, dtype=float))
    # each edge appears twice in the sum over i and j in N_i
    return float(2.0 * np.sum(w**2) / (8.0 * params.nominal_alpha * spec.delta_max**6))


def centroid(pos: np.ndarray) -> np.ndarray:
    return np.asarray(pos, dtype=float).mean(axis=0)


@dataclass
class Normalized:
    xbar: np.ndarray  # (n, D)
    z: np.ndarray  # (n, D)
    D: np.ndarray  # (M,)
    dbar: np.ndarray  # (M,)
    abs_D_sum: np.ndarray  # (n,) sum_j |D_ij|
    dbar_sq_sum: np.ndarray  # (n,) sum_j dbar_ij^2

    def D_matrix(self, spec: FormationSpec) -> np.ndarray:
        g = spec.graph
        out = np.zeros((g.n, g.n))
        out[g.tail, g.head] = self.D
        out[g.head, g.tail] = self.D
        return out


def normalized_quantities(spec: FormationSpec, pos: np.ndarray) -> Normalized:
    pos = np.asarray(pos, dtype=float)
    delta = spec.delta_max
    _, d2 = edge_vectors(spec, pos)
    D = (d2 - spec.desired_sq) / delta**2
    xbar = pos / delta
    z = apply_weighted_laplacian(spec, pos, xbar) / delta**2
    dbar_sq = d2 / delta**2
    return Normalized(
        xbar=xbar,
        z=z,
        D=D,
        dbar=np.sqrt(dbar_sq),
        abs_D_sum=node_sum(spec, np.abs(D)),
        dbar_sq_sum=node_sum(spec, dbar_sq),
    )
