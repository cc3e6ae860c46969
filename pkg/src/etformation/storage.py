"""JSON configs and the CSV / key=value files a run writes.

Floats are written with ``repr`` so every file reads back to the exact
values that produced it.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .controller import ARule, ControllerParams
from .dynamics import PlantConfig
from .engine import CODE_NAMES, SimConfig, SimTrace
from .formation import from_distances, from_target_placement
from .graph import from_edges
from .trigger import TriggerRecord

SWEEP_COLUMNS = ("alpha", "A", "F_T", "triggers_total", "saturated")
EVENT_COLUMNS = ("agent", "time", "condition", "lhs", "threshold")


def config_to_dict(cfg: SimConfig) -> dict:
    p = cfg.params
    return {
        "name": cfg.name,
        "graph": {"n": cfg.n, "edges": [list(e) for e in cfg.spec.graph.edges]},
        "formation": {"desired_dist": cfg.spec.desired_dist.tolist()},
        "initial": cfg.initial.tolist(),
        "initial_theta": None if cfg.initial_theta is None else cfg.initial_theta.tolist(),
        "controller": {
            "alpha": p.alpha,
            "A": p.A.tolist(),
            "sigma": p.sigma.tolist(),
            "a_rule": {"kind": p.a_rule.kind, "value": p.a_rule.value},
            "b": p.b,
            "c": p.c,
            "gain_mode": p.gain_mode,
            "v_max": p.v_max,
            "k_vel": p.k_vel,
            "trigger_distance": p.trigger_distance,
        },
        "plant": {"model": cfg.plant.model, "dt": cfg.plant.dt, "ell": cfg.plant.ell,
                  "v_max": cfg.plant.v_max},
        "trigger": {"mode": cfg.trigger, "period": cfg.period},
        "horizon": cfg.horizon,
        "record_stride": cfg.record_stride,
        "hold": cfg.hold,
        "seed": cfg.seed,
    }


def config_from_dict(d: dict) -> SimConfig:
    """Build a config; ``A`` may be a scalar and ``sigma`` may be ``{"frac": f}``."""
    g = from_edges(int(d["graph"]["n"]), d["graph"]["edges"])
    form = d["formation"]
    if "desired_dist" in form:
        spec = from_distances(g, form["desired_dist"])
    else:
        spec = from_target_placement(g, np.asarray(form["target"], dtype=float))
    initial = np.asarray(d["initial"], dtype=float)
    dim = initial.shape[1]

    c = dict(d.get("controller", {}))
    A = np.asarray(c.pop("A", 0.001), dtype=float)
    if A.ndim == 0:
        A = np.full((g.n, dim), float(A))
    sigma = c.pop("sigma", {"frac": 0.5})
    if isinstance(sigma, dict):
        sigma = np.full(g.n, float(sigma["frac"]) * spec.delta_max**2)
    rule = c.pop("a_rule", {})
    params = ControllerParams(alpha=float(c.pop("alpha")), A=A, sigma=sigma,
                              a_rule=ARule(**rule), **c)

    trig = d.get("trigger", {})
    return SimConfig(
        spec=spec,
        initial=initial,
        params=params,
        plant=PlantConfig(**d.get("plant", {})),
        trigger=trig.get("mode", "event"),
        period=int(trig.get("period", 1)),
        horizon=float(d.get("horizon", 100.0)),
        record_stride=int(d.get("record_stride", 1)),
        initial_theta=d.get("initial_theta"),
        name=d.get("name", "custom"),
        seed=d.get("seed"),
        hold=d.get("hold", "own"),
    )


def save_config(cfg: SimConfig, path) -> None:
    Path(path).write_text(json.dumps(config_to_dict(cfg), indent=2))


def load_config(path) -> SimConfig:
    return config_from_dict(json.loads(Path(path).read_text()))


def trace_columns(dim: int) -> list[str]:
    return (["t", "agent"] + [f"x_{d + 1}" for d in range(dim)]
            + [f"u_{d + 1}" for d in range(dim)] + ["e_norm", "triggered", "condition"])


def write_trace_csv(trace: SimTrace, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(trace_columns(trace.dim))
        for s, t in enumerate(trace.times):
            for i in range(trace.n):
                code = int(trace.condition[s, i])
                w.writerow([repr(float(t)), i]
                           + [repr(float(v)) for v in trace.positions[s, i]]
                           + [repr(float(v)) for v in trace.controls[s, i]]
                           + [repr(float(trace.e_norm[s, i])), int(code != 0), CODE_NAMES[code]])


def read_trace_csv(path) -> dict:
    """Arrays keyed like the trace: times, positions, controls, e_norm, condition."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    agents = sorted({int(r["agent"]) for r in rows})
    n = len(agents)
    dim = sum(1 for k in rows[0] if k.startswith("x_"))
    S = len(rows) // n
    pos = np.array([[float(r[f"x_{d + 1}"]) for d in range(dim)] for r in rows]).reshape(S, n, dim)
    u = np.array([[float(r[f"u_{d + 1}"]) for d in range(dim)] for r in rows]).reshape(S, n, dim)
    return {
        "times": np.array([float(r["t"]) for r in rows[::n]]),
        "positions": pos,
        "controls": u,
        "e_norm": np.array([float(r["e_norm"]) for r in rows]).reshape(S, n),
        "condition": np.array([r["condition"] for r in rows], dtype=object).reshape(S, n),
    }


def write_events_csv(events, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(EVENT_COLUMNS)
        for ev in events:
            w.writerow([ev.agent, repr(ev.time), ev.condition, repr(ev.lhs), repr(ev.threshold)])


def read_events_csv(path) -> list[TriggerRecord]:
    with open(path, newline="") as fh:
        return [TriggerRecord(int(r["agent"]), float(r["time"]), r["condition"],
                              float(r["lhs"]), float(r["threshold"]))
                for r in csv.DictReader(fh)]


def _fmt(v) -> str:
    return repr(float(v)) if isinstance(v, (float, np.floating)) else str(v)


def write_summary(summary: dict, path) -> None:
    Path(path).write_text("".join(f"{k}={_fmt(v)}\n" for k, v in summary.items()))


def _parse(v: str):
    if v in ("True", "False"):
        return v == "True"
    for conv in (int, float):
        try:
            return conv(v)
        except ValueError:
            pass
    return v


def read_summary(path) -> dict:
    out = {}
    for line in Path(path).read_text().splitlines():
        if line.strip():
            k, v = line.split("=", 1)
            out[k] = _parse(v)
    return out


def write_sweep_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SWEEP_COLUMNS)
        for r in rows:
            w.writerow([repr(r.alpha), repr(r.A), repr(r.F_T), repr(r.triggers_total), r.saturated])


def read_sweep_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return [{"alpha": float(r["alpha"]), "A": float(r["A"]), "F_T": float(r["F_T"]),
                 "triggers_total": float(r["triggers_total"]),
                 "saturated": r["saturated"] == "True"} for r in csv.DictReader(fh)]
