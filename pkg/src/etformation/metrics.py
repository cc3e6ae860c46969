"""Trigger counts, formation error and ET-vs-PT comparison."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .controller import edge_weights, node_sum
from .formation import FormationSpec
from .trigger import TriggerState


def tau_average(ts: TriggerState, k: int) -> float:
    if k == 1:
        return float(np.mean(ts.tau1))
    if k == 2:
        return float(np.mean(ts.tau2))
    raise ValueError(f"k must be 1 or 2, got {k}")


def formation_error(spec: FormationSpec, pos: np.ndarray) -> float:
    """Mean over agents of the mean |D_ij| over each agent's neighbours."""
    deg = spec.graph.degree()
    if np.any(deg == 0):
        raise ValueError(f"agent {int(np.argmin(deg))} has no neighbours")
    absD = np.abs(edge_weights(spec, np.asarray(pos, dtype=float))) / spec.delta_max**2
    return float(np.mean(node_sum(spec, absD) / deg))


@dataclass
class RunSummary:
    scenario: str
    trigger: str
    n_agents: int
    steps: int
    dt: float
    horizon: float
    tau1_avg: float
    tau2_avg: float
    periodic_avg: float
    total_updates_avg: float
    F_initial: float
    F_final: float
    V_initial: float
    V_final: float
    saturation: bool
    centroid_drift: float
    wall_time: float
    F_series: list = field(default_factory=list, repr=False)

    def flat(self) -> dict:
        """Scalar fields only, for key=value files."""
        d = asdict(self)
        d.pop("F_series")
        return d


def summarize(trace) -> RunSummary:
    ts = trace.trigger_state
    return RunSummary(
        scenario=trace.name,
        trigger=trace.trigger,
        n_agents=trace.n,
        steps=trace.steps,
        dt=trace.dt,
        horizon=trace.steps * trace.dt,
        tau1_avg=tau_average(ts, 1),
        tau2_avg=tau_average(ts, 2),
        periodic_avg=float(np.mean(ts.periodic)),
        total_updates_avg=float(np.mean(ts.tau1 + ts.tau2 + ts.periodic)),
        F_initial=float(trace.F_series[0]),
        F_final=float(trace.F_final),
        V_initial=float(trace.V_series[0]),
        V_final=float(trace.V_series[-1]),
        saturation=bool(trace.saturated),
        centroid_drift=float(trace.centroid_drift),
        wall_time=float(trace.wall_time),
        F_series=[float(f) for f in trace.F_series],
    )


@dataclass
class Comparison:
    scenario: str
    et_updates: float
    pt_updates: float
    reduction: float
    F_et: float
    F_pt: float

    def __str__(self):
        return (f"{self.scenario}: ET {self.et_updates:.1f} vs PT {self.pt_updates:.1f} updates "
                f"({100 * self.reduction:.1f}% fewer), F(T) ET {self.F_et:.4f} / PT {self.F_pt:.4f}")


def compare(et: RunSummary, pt: RunSummary) -> Comparison:
    if (et.scenario, et.n_agents, et.steps) != (pt.scenario, pt.n_agents, pt.steps):
        raise ValueError("ET and PT summaries come from different scenarios")
    et_total = et.tau1_avg + et.tau2_avg
    return Comparison(et.scenario, et_total, pt.total_updates_avg,
                      1.0 - et_total / pt.total_updates_avg, et.F_final, pt.F_final)
