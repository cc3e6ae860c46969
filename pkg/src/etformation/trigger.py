"""Event generation: thresholds, the two trigger conditions, periodic baseline."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .controller import (BroadcastTable, ControllerParams, Normalized,
                         ParameterRangeError, normalized_quantities)
from .formation import FormationSpec

EPS_DEN = 1e-12
BETA_LARGE = 1e9

COND1, COND2, PERIODIC, INITIAL = "1", "2", "periodic", "initial"


@dataclass(frozen=True)
class TriggerRecord:
    agent: int
    time: float
    condition: str
    lhs: float = 0.0
    threshold: float = 0.0


@dataclass
class TriggerState:
    e: np.ndarray
    tau1: np.ndarray
    tau2: np.ndarray
    periodic: np.ndarray
    log: list = field(default_factory=list)

    @classmethod
    def empty(cls, n: int, dim: int) -> "TriggerState":
        z = np.zeros(n, dtype=np.int64)
        return cls(np.zeros((n, dim)), z.copy(), z.copy(), z.copy())

    def record(self, rec: TriggerRecord) -> None:
        self.log.append(rec)
        if rec.condition == COND1:
            self.tau1[rec.agent] += 1
        elif rec.condition == COND2:
            self.tau2[rec.agent] += 1
        elif rec.condition == PERIODIC:
            self.periodic[rec.agent] += 1
        self.e[rec.agent] = 0.0


def _a_terms(params: ControllerParams, S: np.ndarray):
    """Return (1 - a_i S_i, S_i / a_i) for every agent.

    With the fraction rule both are finite in the S_i -> 0 limit; the first
    term of B_i is then 0.
    """
    rule = params.a_rule
    if rule.kind == "fraction":
        return np.full_like(S, 1.0 - rule.value), S**2 / rule.value
    aS = rule.value * S
    bad = aS >= 1.0
    if np.any(bad):
        i = int(np.argmax(bad))
        raise ParameterRangeError(
            f"a_{i} = {rule.value:g} violates a_i < 1/sum|D_ij| = {1 / S[i]:g}")
    return 1.0 - aS, S / rule.value


def beta_all(spec: FormationSpec, params: ControllerParams, pos: np.ndarray,
             nq: Normalized | None = None) -> np.ndarray:
    nq = normalized_quantities(spec, pos) if nq is None else nq
    factor, _ = _a_terms(params, nq.abs_D_sum)
    z2 = (nq.z**2).sum(axis=1)
    x2 = (nq.xbar**2).sum(axis=1)
    num = factor * z2 + params.A.sum(axis=1)
    den = nq.dbar_sq_sum * ((params.b + params.c) * z2 + x2 / params.b)
    beta = np.full(len(num), BETA_LARGE)
    ok = den >= EPS_DEN
    beta[ok] = np.sqrt(num[ok] / den[ok] + 1.0) - 1.0
    return beta


def big_b_all(spec: FormationSpec, params: ControllerParams, pos: np.ndarray,
              beta: np.ndarray, nq: Normalized | None = None) -> np.ndarray:
    nq = normalized_quantities(spec, pos) if nq is None else nq
    _, first = _a_terms(params, nq.abs_D_sum)
    return first + (beta**2 + 2.0 * beta) * nq.dbar_sq_sum / params.c


def beta_i(spec, params, i, pos) -> float:
    return float(beta_all(spec, params, pos)[i])


def big_b_i(spec, params, i, pos, beta) -> float:
    full = np.zeros(spec.graph.n)
    full[i] = beta
    return float(big_b_all(spec, params, pos, full)[i])


@dataclass
class EventCheck:
    """Per-agent outcome of one evaluation of both conditions."""

    cond1: np.ndarray  # bool (n,)
    cond2: np.ndarray  # bool (n,)
    lhs1: np.ndarray  # worst ||e_j - e_i|| over neighbours
    thr1: np.ndarray  # beta_i * delta_ij for that neighbour
    lhs2: np.ndarray  # ||e_i||^2
    thr2: np.ndarray  # sigma_i * sum_d A_id / B_i
    beta: np.ndarray
    B: np.ndarray

    @property
    def fired(self) -> np.ndarray:
        return self.cond1 | self.cond2

    def condition(self, i: int) -> str:
        return COND1 if self.cond1[i] else COND2

    def as_set(self) -> set:
        return {(int(i), self.condition(i)) for i in np.flatnonzero(self.fired)}


def evaluate_events(spec: FormationSpec, params: ControllerParams, pos_true: np.ndarray,
                    bt: BroadcastTable, e: np.ndarray | None = None) -> EventCheck:
    g = spec.graph
    pos_true = np.asarray(pos_true, dtype=float)
    if e is None:
        e = bt.last_pos - pos_true
    nq = normalized_quantities(spec, pos_true)
    beta = beta_all(spec, params, pos_true, nq)
    B = big_b_all(spec, params, pos_true, beta, nq)

    if params.trigger_distance == "true":
        dist = nq.dbar * spec.delta_max
    else:
        dist = np.linalg.norm(bt.last_pos[g.head] - bt.last_pos[g.tail], axis=1)
    de = np.linalg.norm(e[g.head] - e[g.tail], axis=1)

    # condition 1, one entry per (agent, neighbour) edge end; keep the worst neighbour
    n = g.n
    ends = np.concatenate([g.tail, g.head])
    lhs = np.concatenate([de, de])
    thr = beta[ends] * np.concatenate([dist, dist])
    margin = np.where(lhs > 0, lhs - thr, -np.inf)
    order = np.lexsort((margin, ends))
    last = np.flatnonzero(np.r_[ends[order][1:] != ends[order][:-1], True])
    worst = order[last]
    lhs1 = np.zeros(n)
    thr1 = np.full(n, np.inf)
    cond1 = np.zeros(n, dtype=bool)
    lhs1[ends[worst]] = lhs[worst]
    thr1[ends[worst]] = thr[worst]
    cond1[ends[worst]] = margin[worst] >= 0.0

    lhs2 = (e**2).sum(axis=1)
    with np.errstate(divide="ignore"):
        thr2 = np.where(B > 0, params.sigma * params.A.sum(axis=1) / np.where(B > 0, B, 1.0), np.inf)
    cond2 = (lhs2 >= thr2) & (lhs2 > 0)
    return EventCheck(cond1, cond2 & ~cond1, lhs1, thr1, lhs2, thr2, beta, B)


def check_events(spec: FormationSpec, params: ControllerParams, pos_true: np.ndarray,
                 bt: BroadcastTable, ts: TriggerState | None = None) -> set:
    """Set of ``(agent, condition)``; condition 1 wins when both fire."""
    e = None if ts is None else ts.e
    return evaluate_events(spec, params, pos_true, bt, e).as_set()


@dataclass(frozen=True)
class PeriodicPolicy:
    period_steps: int = 1

    def __post_init__(self):
        if int(self.period_steps) < 1:
            raise ValueError("period must be at least one step")

    def fires(self, step: int) -> bool:
        return step % self.period_steps == 0


def periodic_policy(period_steps: int) -> PeriodicPolicy:
    return PeriodicPolicy(int(period_steps))
